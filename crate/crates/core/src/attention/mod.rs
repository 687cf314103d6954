//! Reference forward passes for the attention blocks.
//!
//! These are plain f64 implementations meant as ground truth: no fusion, no
//! approximation, bitwise deterministic for fixed inputs and weights. Token
//! rows follow the right-multiplication convention throughout: a feature map
//! flattens to an (n x c) matrix of pixel rows, and a projection is
//! `tokens * w` with `w` stored row-major.
//!
//! - [`sab_forward`]: window-local self-attention over pixel tokens
//! - [`cab_forward`]: channel attention over the whole image
//! - [`sfnn_forward`]: gated feed-forward with a depthwise spatial mix
//! - [`glia_forward`]: learned per-window tokens exchanging globally, then
//!   rejoining their windows

mod cab;
mod glia;
mod linalg;
mod sab;
mod sfnn;

pub use cab::cab_forward;
pub use glia::{glia_forward, GliaParams, MlpParams};
pub use sab::sab_forward;
pub use sfnn::{sfnn_forward, SfnnParams};

use crate::error::{Error, Result};
use crate::tensor::ImageTensor;
use linalg::{softmax_rows_in_place, Mat};

/// Attention blocks consume and produce ordinary image tensors.
pub type FeatureMap = ImageTensor;

/// Projection weights shared by the attention variants. Each `w*` is a
/// row-major c x c matrix applied from the right. `alpha` is the logit
/// temperature for channel attention; `window` the spatial tile for the
/// windowed variants. Blocks ignore the fields they have no use for.
#[derive(Clone, Debug, PartialEq)]
pub struct AttentionParams {
    pub heads: usize,
    pub window: usize,
    pub alpha: f64,
    pub wq: Vec<f64>,
    pub wk: Vec<f64>,
    pub wv: Vec<f64>,
    pub wo: Vec<f64>,
}

impl AttentionParams {
    /// Identity projections: every `w*` is the identity matrix, alpha 1.
    pub fn identity(heads: usize, window: usize, channels: usize) -> Self {
        let mut eye = vec![0.0; channels * channels];
        for i in 0..channels {
            eye[i * channels + i] = 1.0;
        }
        AttentionParams {
            heads,
            window,
            alpha: 1.0,
            wq: eye.clone(),
            wk: eye.clone(),
            wv: eye.clone(),
            wo: eye,
        }
    }

    pub(crate) fn check(&self, channels: usize) -> Result<()> {
        if self.heads == 0 || channels % self.heads != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} heads cannot split {channels} channels",
                self.heads
            )));
        }
        if self.window == 0 {
            return Err(Error::InvalidArgument("window must be positive".into()));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {}", self.alpha)));
        }
        for (name, w) in [("wq", &self.wq), ("wk", &self.wk), ("wv", &self.wv), ("wo", &self.wo)] {
            if w.len() != channels * channels {
                return Err(Error::Shape(format!(
                    "{name} has {} entries, needs {channels}x{channels}",
                    w.len()
                )));
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("{name} weights")));
            }
        }
        Ok(())
    }
}

/// Max-shifted softmax over each `cols`-wide row of a flat buffer. This is
/// the exact normalization the attention blocks apply to their logit rows,
/// exposed so the row-sum contract can be probed directly.
pub fn softmax_rows(data: &mut [f64], cols: usize) -> Result<()> {
    if cols == 0 || data.len() % cols != 0 {
        return Err(Error::Shape(format!("buffer of {} is not rows of {cols}", data.len())));
    }
    let mut m = Mat::from_vec(data.len() / cols, cols, data.to_vec());
    softmax_rows_in_place(&mut m);
    data.copy_from_slice(&m.data);
    Ok(())
}

/// Cut an exactly tileable map into window x window tiles, row-major over
/// the tile grid.
pub fn window_partition(x: &FeatureMap, window: usize) -> Result<Vec<FeatureMap>> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let (h, w, c) = x.dims();
    if h % window != 0 || w % window != 0 {
        return Err(Error::Shape(format!("{h}x{w} is not tileable by {window}x{window} windows")));
    }
    let mut out = Vec::with_capacity((h / window) * (w / window));
    for wy in 0..h / window {
        for wx in 0..w / window {
            out.push(ImageTensor::from_fn(window, window, c, |y, xx, ch| {
                x.get(wy * window + y, wx * window + xx, ch)
            })?);
        }
    }
    Ok(out)
}

/// Inverse of [`window_partition`] for the stated full size.
pub fn window_merge(
    windows: &[FeatureMap],
    height: usize,
    width: usize,
    window: usize,
) -> Result<FeatureMap> {
    if window == 0 || height % window != 0 || width % window != 0 {
        return Err(Error::Shape(format!("{height}x{width} is not tileable by {window}")));
    }
    let (gy, gx) = (height / window, width / window);
    if windows.len() != gy * gx {
        return Err(Error::Shape(format!("expected {} windows, got {}", gy * gx, windows.len())));
    }
    let c = windows[0].dims().2;
    for t in windows {
        if t.dims() != (window, window, c) {
            return Err(Error::Shape(format!("window tile has dims {:?}", t.dims())));
        }
    }
    ImageTensor::from_fn(height, width, c, |y, x, ch| {
        let tile = &windows[(y / window) * gx + x / window];
        tile.get(y % window, x % window, ch)
    })
}

/// Pixel rows of a map as an (h*w) x c token matrix, row-major.
pub(crate) fn to_tokens(x: &ImageTensor) -> Mat {
    let (h, w, c) = x.dims();
    Mat::from_vec(h * w, c, x.as_slice().to_vec())
}

pub(crate) fn from_tokens(m: &Mat, height: usize, width: usize) -> Result<ImageTensor> {
    assert_eq!(m.rows, height * width);
    ImageTensor::new(height, width, m.cols, m.data.clone())
}

/// Weight matrices of one attention application, prebuilt so window loops
/// do not re-copy them.
pub(crate) struct Projections {
    heads: usize,
    wq: Mat,
    wk: Mat,
    wv: Mat,
    wo: Mat,
}

impl Projections {
    pub fn new(p: &AttentionParams, channels: usize) -> Self {
        Projections {
            heads: p.heads,
            wq: Mat::from_vec(channels, channels, p.wq.clone()),
            wk: Mat::from_vec(channels, channels, p.wk.clone()),
            wv: Mat::from_vec(channels, channels, p.wv.clone()),
            wo: Mat::from_vec(channels, channels, p.wo.clone()),
        }
    }
}

/// Standard multi-head self-attention over token rows with 1/sqrt(head dim)
/// logit scaling. Shared by the windowed block and the token stages.
pub(crate) fn msa(x: &Mat, p: &Projections) -> Mat {
    let c = x.cols;
    let dh = c / p.heads;
    let q = x.matmul(&p.wq);
    let k = x.matmul(&p.wk);
    let v = x.matmul(&p.wv);
    let mut o = Mat::zeros(x.rows, c);
    for h in 0..p.heads {
        let (lo, hi) = (h * dh, (h + 1) * dh);
        let mut a = q.col_slice(lo, hi).matmul(&k.col_slice(lo, hi).transpose());
        a.scale(1.0 / (dh as f64).sqrt());
        softmax_rows_in_place(&mut a);
        o.set_cols(lo, &a.matmul(&v.col_slice(lo, hi)));
    }
    o.matmul(&p.wo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(h: usize, w: usize, c: usize) -> ImageTensor {
        ImageTensor::from_fn(h, w, c, |y, x, ch| (y * w * c + x * c + ch) as f64).unwrap()
    }

    #[test]
    fn partition_is_row_major_and_merge_inverts() {
        let x = ramp(4, 6, 2);
        let tiles = window_partition(&x, 2).unwrap();
        assert_eq!(tiles.len(), 6);
        // tile 1 covers columns 2..4 of rows 0..2
        assert_eq!(tiles[1].get(0, 0, 0), x.get(0, 2, 0));
        assert_eq!(tiles[4].get(1, 1, 1), x.get(3, 3, 1));
        let back = window_merge(&tiles, 4, 6, 2).unwrap();
        assert_eq!(back.as_slice(), x.as_slice());
    }

    #[test]
    fn exposed_softmax_normalizes_each_row() {
        let mut data = vec![0.0, 1.0, 2.0, 1000.0, 1001.0, 999.0, -50.0, -50.0, -50.0];
        softmax_rows(&mut data, 3).unwrap();
        for row in data.chunks(3) {
            let s: f64 = row.iter().sum();
            assert!((s - 1.0).abs() <= 1e-12, "row sums to {s}");
            assert!(row.iter().all(|&p| p > 0.0 && p <= 1.0));
        }
        // equal logits split evenly regardless of magnitude
        assert_eq!(data[6], data[7]);
        assert_eq!(&data[6], &data[8]);
        assert!(softmax_rows(&mut data, 2).is_err());
        assert!(softmax_rows(&mut data, 0).is_err());
    }

    #[test]
    fn partition_rejects_untileable_shapes() {
        let x = ramp(4, 6, 1);
        assert!(window_partition(&x, 4).is_err());
        assert!(window_partition(&x, 0).is_err());
        let tiles = window_partition(&x, 2).unwrap();
        assert!(window_merge(&tiles, 4, 4, 2).is_err());
        assert!(window_merge(&tiles[..5], 4, 6, 2).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(AttentionParams::identity(2, 4, 6).check(6).is_ok());
        assert!(AttentionParams::identity(4, 4, 6).check(6).is_err());
        assert!(AttentionParams::identity(0, 4, 6).check(6).is_err());
        assert!(AttentionParams::identity(1, 0, 6).check(6).is_err());
        let mut p = AttentionParams::identity(1, 4, 2);
        p.alpha = 0.0;
        assert!(p.check(2).is_err());
        let mut p = AttentionParams::identity(1, 4, 2);
        p.wk.pop();
        assert!(p.check(2).is_err());
    }

    #[test]
    fn token_round_trip_preserves_layout() {
        let x = ramp(3, 4, 2);
        let t = to_tokens(&x);
        assert_eq!(t.rows, 12);
        assert_eq!(t.at(5, 1), x.get(1, 1, 1));
        let back = from_tokens(&t, 3, 4).unwrap();
        assert_eq!(back.as_slice(), x.as_slice());
    }
}
