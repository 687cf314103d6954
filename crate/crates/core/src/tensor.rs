//! Dense image carrier shared by every module.
//!
//! Layout is row-major with y outermost, then x, then channel: the sample at
//! (y, x, c) lives at `(y * width + x) * channels + c`. All values are f64
//! and finite; constructors reject NaN and infinities so downstream kernels
//! never have to re-check.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BorderPolicy {
    /// Mirror across the edge sample without repeating it:
    /// [1,2,3] extended by 2 becomes [3,2,1,2,3,2,1].
    #[default]
    Symmetric,
    /// Repeat the edge sample.
    Replicate,
    /// Treat everything outside as zero.
    Zero,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageTensor {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageTensor {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::Shape(format!(
                "tensor dims must be >= 1, got {height}x{width}x{channels}"
            )));
        }
        let expected = height
            .checked_mul(width)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| Error::Shape("tensor dims overflow".into()))?;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "expected {expected} elements for {height}x{width}x{channels}, got {}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("element {i} is {}", data[i])));
        }
        Ok(Self { height, width, channels, data })
    }

    /// All-zero tensor. Panics on zero dims; those are programmer errors,
    /// not data errors.
    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        assert!(height >= 1 && width >= 1 && channels >= 1, "zero tensor dim");
        Self { height, width, channels, data: vec![0.0; height * width * channels] }
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(y, x, c));
                }
            }
        }
        Self::new(height, width, channels, data)
    }

    /// Single-channel constructor; `data` is row-major y then x.
    pub fn gray(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(height, width, 1, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false // dims are always >= 1
    }

    #[inline]
    pub fn idx(&self, y: usize, x: usize, c: usize) -> usize {
        (y * self.width + x) * self.channels + c
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[self.idx(y, x, c)]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, c: usize, v: f64) {
        debug_assert!(v.is_finite(), "storing non-finite {v}");
        let i = self.idx(y, x, c);
        self.data[i] = v;
    }

    /// Sample at (y, x) of a single-channel tensor.
    #[inline]
    pub fn at(&self, y: usize, x: usize) -> f64 {
        debug_assert_eq!(self.channels, 1);
        self.data[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn same_dims(&self, other: &Self) -> bool {
        self.dims() == other.dims()
    }

    pub(crate) fn require_same_dims(&self, other: &Self, what: &str) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what}: {}x{}x{} vs {}x{}x{}",
                self.height, self.width, self.channels, other.height, other.width, other.channels
            )))
        }
    }

    pub(crate) fn require_single_channel(&self, what: &str) -> Result<()> {
        if self.channels == 1 {
            Ok(())
        } else {
            Err(Error::Shape(format!("{what} expects a single channel, got {}", self.channels)))
        }
    }

    /// Sum of squared elements.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// Index into a length-`n` axis after border extension. `None` means the
/// sample is outside and the policy fills zero.
#[inline]
pub(crate) fn resolve_index(i: isize, n: usize, policy: BorderPolicy) -> Option<usize> {
    if i >= 0 && (i as usize) < n {
        return Some(i as usize);
    }
    match policy {
        BorderPolicy::Symmetric => Some(mirror_index(i, n)),
        BorderPolicy::Replicate => Some(i.clamp(0, n as isize - 1) as usize),
        BorderPolicy::Zero => None,
    }
}

/// Mirror without edge repetition, periodic with period 2(n-1).
fn mirror_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    let m = if m < n as isize { m } else { period - m };
    m as usize
}

/// Pads `x` by `radius` samples on every side of both spatial axes.
pub fn extend_border(x: &ImageTensor, radius: usize, policy: BorderPolicy) -> ImageTensor {
    let (h, w, c) = x.dims();
    let r = radius as isize;
    let mut out = ImageTensor::zeros(h + 2 * radius, w + 2 * radius, c);
    for oy in 0..out.height {
        let sy = resolve_index(oy as isize - r, h, policy);
        for ox in 0..out.width {
            let sx = resolve_index(ox as isize - r, w, policy);
            if let (Some(sy), Some(sx)) = (sy, sx) {
                for ch in 0..c {
                    let v = x.get(sy, sx, ch);
                    out.set(oy, ox, ch, v);
                }
            }
        }
    }
    out
}
