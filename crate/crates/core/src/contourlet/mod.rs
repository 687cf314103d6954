//! Multiscale directional decomposition.
//!
//! A Laplacian pyramid separates scales, then each band-pass level is split
//! into frequency wedges by the directional filter bank. Both stages invert
//! exactly up to float roundoff, so the composed transform does too. The
//! module also carries the gated fusion step that merges a spatial branch
//! with a spectral branch under control of a feature map, and a small binary
//! container format for coefficient files.
//!
//! Sizes never need to be powers of two: decimation ceil-halves, and the
//! wedge masks are defined on whatever DFT grid a level has.

mod dfb;
mod format;
mod kernel;
mod pyramid;

pub use dfb::{dfb_decompose, dfb_reconstruct, DirectionalSubbands, MAX_DFB_ORDER};
pub use format::{read_coefficients, write_coefficients};
pub use kernel::GaussianKernel;
pub use pyramid::{
    gaussian_downsample, laplacian_level, lp_decompose, lp_reconstruct, LaplacianPyramid,
};

use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

/// Complete transform of one single-channel image.
///
/// `directional` runs coarse to fine: `directional[0]` are the wedges of the
/// coarsest band-pass level. `base` is the residual low-pass.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourletCoefficients {
    pub height: usize,
    pub width: usize,
    pub base: ImageTensor,
    pub directional: Vec<DirectionalSubbands>,
}

impl ContourletCoefficients {
    pub fn levels(&self) -> usize {
        self.directional.len()
    }

    /// Wedge orders per level, coarse to fine.
    pub fn level_spec(&self) -> Vec<usize> {
        self.directional.iter().map(|d| d.order).collect()
    }

    pub fn subband_count(&self) -> usize {
        self.directional.iter().map(|d| d.bands.len()).sum()
    }

    /// Stored samples across the base and every directional band.
    pub fn total_coefficients(&self) -> usize {
        self.base.len()
            + self
                .directional
                .iter()
                .map(|d| d.bands.iter().map(ImageTensor::len).sum::<usize>())
                .sum::<usize>()
    }

    /// Grid sizes the chain implies: per-level dims coarse to fine, then the
    /// base dims.
    pub(crate) fn expected_dims(height: usize, width: usize, levels: usize) -> (Vec<(usize, usize)>, (usize, usize)) {
        let mut fine_to_coarse = Vec::with_capacity(levels);
        let (mut h, mut w) = (height, width);
        for _ in 0..levels {
            fine_to_coarse.push((h, w));
            h = h.div_ceil(2);
            w = w.div_ceil(2);
        }
        fine_to_coarse.reverse();
        (fine_to_coarse, (h, w))
    }
}

pub fn contourlet_decompose(x: &ImageTensor, level_spec: &[usize]) -> Result<ContourletCoefficients> {
    contourlet_decompose_with(x, level_spec, &GaussianKernel::default())
}

pub fn contourlet_decompose_with(
    x: &ImageTensor,
    level_spec: &[usize],
    kernel: &GaussianKernel,
) -> Result<ContourletCoefficients> {
    x.require_single_channel("contourlet decomposition")?;
    if level_spec.is_empty() {
        return Err(Error::InvalidArgument("level spec must name at least one level".into()));
    }
    let levels = level_spec.len();
    let lp = lp_decompose(x, levels, kernel)?;
    let mut directional = Vec::with_capacity(levels);
    for (j, &order) in level_spec.iter().enumerate() {
        // level_spec runs coarse to fine, pyramid levels fine to coarse
        directional.push(dfb_decompose(&lp.levels[levels - 1 - j], order)?);
    }
    let (h, w, _) = x.dims();
    Ok(ContourletCoefficients { height: h, width: w, base: lp.base, directional })
}

pub fn contourlet_reconstruct(c: &ContourletCoefficients) -> Result<ImageTensor> {
    contourlet_reconstruct_with(c, &GaussianKernel::default())
}

pub fn contourlet_reconstruct_with(
    c: &ContourletCoefficients,
    kernel: &GaussianKernel,
) -> Result<ImageTensor> {
    if c.directional.is_empty() {
        return Err(Error::InvalidArgument("coefficients hold no levels".into()));
    }
    let (level_dims, base_dims) =
        ContourletCoefficients::expected_dims(c.height, c.width, c.directional.len());
    let (bh, bw, _) = c.base.dims();
    if (bh, bw) != base_dims {
        return Err(Error::Shape(format!(
            "base is {bh}x{bw}, expected {}x{} for {} levels of {}x{}",
            base_dims.0,
            base_dims.1,
            c.directional.len(),
            c.height,
            c.width
        )));
    }
    let mut levels = Vec::with_capacity(c.directional.len());
    for (subbands, &(eh, ew)) in c.directional.iter().zip(&level_dims) {
        let level = dfb_reconstruct(subbands)?;
        let (lh, lw, _) = level.dims();
        if (lh, lw) != (eh, ew) {
            return Err(Error::Shape(format!("level is {lh}x{lw}, expected {eh}x{ew}")));
        }
        levels.push(level);
    }
    levels.reverse();
    lp_reconstruct(&LaplacianPyramid { levels, base: c.base.clone() }, kernel)
}

/// Per-channel gate driving the spatial/spectral merge.
///
/// `weight` is row-major c x c over channels; `bias` has one entry per
/// channel. The gate for output channel i is the logistic of
/// `weight[i] . features + bias[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GateParams {
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl GateParams {
    fn check(&self, channels: usize) -> Result<()> {
        if self.bias.len() != channels || self.weight.len() != channels * channels {
            return Err(Error::Shape(format!(
                "gate sized for {} channels, input has {channels}",
                self.bias.len()
            )));
        }
        if self.weight.iter().chain(&self.bias).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("gate parameters".into()));
        }
        Ok(())
    }
}

/// Logistic that never exponentiates a positive argument, so large |t| maps
/// to exactly 0.0 or 1.0 instead of overflowing.
fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// out = spatial + gate(features) * spectral, elementwise per pixel.
pub fn crg_fuse(
    spatial: &ImageTensor,
    spectral: &ImageTensor,
    features: &ImageTensor,
    gate: &GateParams,
) -> Result<ImageTensor> {
    spatial.require_same_dims(spectral, "spatial and spectral branches")?;
    spatial.require_same_dims(features, "spatial branch and gate features")?;
    let (h, w, c) = spatial.dims();
    gate.check(c)?;
    let mut out = ImageTensor::zeros(h, w, c);
    for y in 0..h {
        for x in 0..w {
            for i in 0..c {
                let mut t = gate.bias[i];
                for j in 0..c {
                    t += gate.weight[i * c + j] * features.get(y, x, j);
                }
                let v = spatial.get(y, x, i) + sigmoid(t) * spectral.get(y, x, i);
                out.set(y, x, i, v);
            }
        }
    }
    Ok(out)
}
