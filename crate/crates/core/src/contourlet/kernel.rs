use crate::error::{Error, Result};

/// Separable low-pass taps used by the pyramid. Must be odd-length,
/// symmetric, and sum to 1 so that constants survive filtering.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianKernel {
    taps: Vec<f64>,
}

impl GaussianKernel {
    pub fn new(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() || taps.len() % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "kernel taps must have odd length, got {}",
                taps.len()
            )));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("kernel tap".into()));
        }
        let sum: f64 = taps.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("kernel taps sum to {sum}, want 1")));
        }
        let n = taps.len();
        if (0..n / 2).any(|i| taps[i] != taps[n - 1 - i]) {
            return Err(Error::InvalidArgument("kernel taps must be symmetric".into()));
        }
        Ok(Self { taps })
    }

    /// The 5-tap binomial kernel [1, 4, 6, 4, 1] / 16.
    pub fn binomial5() -> Self {
        Self { taps: vec![1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0] }
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn radius(&self) -> usize {
        self.taps.len() / 2
    }

    /// Taps doubled, for interpolating a zero-upsampled grid.
    pub(crate) fn interpolation_taps(&self) -> Vec<f64> {
        self.taps.iter().map(|t| 2.0 * t).collect()
    }

    /// Escape hatch for negative-control tests that need a deliberately
    /// broken kernel past validation.
    #[doc(hidden)]
    pub fn from_taps_unchecked(taps: Vec<f64>) -> Self {
        Self { taps }
    }
}

impl Default for GaussianKernel {
    fn default() -> Self {
        Self::binomial5()
    }
}
