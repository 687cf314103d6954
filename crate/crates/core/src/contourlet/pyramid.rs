//! Laplacian pyramid with ceil-halving decimation.
//!
//! Decomposition stores, per level, the residual between the incoming image
//! and the interpolated version of its low-pass decimation. Reconstruction
//! adds the interpolation back, so the round trip is exact up to float
//! roundoff for *any* kernel; the kernel only shapes what the residuals
//! look like.

use super::kernel::GaussianKernel;
use crate::conv::separable_conv;
use crate::error::{Error, Result};
use crate::tensor::{BorderPolicy, ImageTensor};

/// levels[0] is the full-resolution residual; each following level is
/// ceil-halved. `base` is the low-pass left after the last level.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianPyramid {
    pub levels: Vec<ImageTensor>,
    pub base: ImageTensor,
}

impl LaplacianPyramid {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

pub(crate) fn ceil_half(n: usize) -> usize {
    n.div_ceil(2)
}

/// Low-pass filter with symmetric borders, then keep even rows/columns.
/// Output dims are ceil(H/2) x ceil(W/2).
pub fn gaussian_downsample(x: &ImageTensor, h: &GaussianKernel) -> Result<ImageTensor> {
    let (ih, iw, c) = x.dims();
    if ih == 1 && iw == 1 {
        return Err(Error::DegenerateSize("cannot decimate a 1x1 image".into()));
    }
    let filtered = separable_conv(x, h.taps(), BorderPolicy::Symmetric);
    let (oh, ow) = (ceil_half(ih), ceil_half(iw));
    Ok(ImageTensor::from_fn(oh, ow, c, |y, xx, ch| filtered.get(2 * y, 2 * xx, ch))
        .expect("decimation keeps finite values"))
}

/// Zero-stuff odd positions, filter with the doubled taps per axis, and crop
/// back to the parent size.
pub(crate) fn expand(g: &ImageTensor, target_h: usize, target_w: usize, h: &GaussianKernel) -> ImageTensor {
    let (gh, gw, c) = g.dims();
    debug_assert!(target_h == 2 * gh || target_h + 1 == 2 * gh);
    debug_assert!(target_w == 2 * gw || target_w + 1 == 2 * gw);
    let mut up = ImageTensor::zeros(2 * gh, 2 * gw, c);
    for y in 0..gh {
        for x in 0..gw {
            for ch in 0..c {
                up.set(2 * y, 2 * x, ch, g.get(y, x, ch));
            }
        }
    }
    let smoothed = separable_conv(&up, &h.interpolation_taps(), BorderPolicy::Symmetric);
    ImageTensor::from_fn(target_h, target_w, c, |y, x, ch| smoothed.get(y, x, ch))
        .expect("crop keeps finite values")
}

/// Residual of one pyramid step: x_prev minus the interpolation of its
/// decimated low-pass g.
pub fn laplacian_level(
    x_prev: &ImageTensor,
    g: &ImageTensor,
    h: &GaussianKernel,
) -> Result<ImageTensor> {
    let (ph, pw, pc) = x_prev.dims();
    let (gh, gw, gc) = g.dims();
    if gh != ceil_half(ph) || gw != ceil_half(pw) || gc != pc {
        return Err(Error::Shape(format!(
            "low-pass {gh}x{gw}x{gc} does not decimate {ph}x{pw}x{pc}"
        )));
    }
    let up = expand(g, ph, pw, h);
    ImageTensor::from_fn(ph, pw, pc, |y, x, c| x_prev.get(y, x, c) - up.get(y, x, c))
}

pub fn lp_decompose(x: &ImageTensor, levels: usize, h: &GaussianKernel) -> Result<LaplacianPyramid> {
    if levels == 0 {
        return Err(Error::InvalidArgument("pyramid needs at least one level".into()));
    }
    let (ih, iw, _) = x.dims();
    let need = 1usize
        .checked_shl(levels as u32)
        .ok_or_else(|| Error::InvalidArgument(format!("{levels} levels is out of range")))?;
    if ih.min(iw) < need {
        return Err(Error::DegenerateSize(format!(
            "{ih}x{iw} supports fewer than {levels} levels (needs min dim >= {need})"
        )));
    }
    let mut out = Vec::with_capacity(levels);
    let mut cur = x.clone();
    for _ in 0..levels {
        let g = gaussian_downsample(&cur, h)?;
        out.push(laplacian_level(&cur, &g, h)?);
        cur = g;
    }
    Ok(LaplacianPyramid { levels: out, base: cur })
}

/// Exact inverse of [`lp_decompose`] when given the same kernel.
pub fn lp_reconstruct(p: &LaplacianPyramid, h: &GaussianKernel) -> Result<ImageTensor> {
    if p.levels.is_empty() {
        return Err(Error::InvalidArgument("pyramid has no levels".into()));
    }
    let mut cur = p.base.clone();
    for level in p.levels.iter().rev() {
        let (lh, lw, lc) = level.dims();
        let (ch, cw, cc) = cur.dims();
        if ch != ceil_half(lh) || cw != ceil_half(lw) || cc != lc {
            return Err(Error::Shape(format!(
                "cannot expand {ch}x{cw}x{cc} onto level {lh}x{lw}x{lc}"
            )));
        }
        let up = expand(&cur, lh, lw, h);
        cur = ImageTensor::from_fn(lh, lw, lc, |y, x, c| level.get(y, x, c) + up.get(y, x, c))?;
    }
    Ok(cur)
}
