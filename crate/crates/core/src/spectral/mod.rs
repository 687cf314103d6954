//! Frequency-domain pipeline: DFT, center shift, log magnitude,
//! normalization, the spectral fidelity loss with its analytic gradient, and
//! radial averaging for profile plots.
//!
//! The magnitude pipeline used by the loss is always the same sequence:
//! `dft2` -> `fftshift` -> `log_magnitude` -> `normalize_spectrum`.

mod fft;
mod loss;
mod radial;

pub use loss::{spectral_fidelity_grad, spectral_fidelity_loss};
pub use radial::{radial_spectrum, RadialHistogram};

pub type Complex64 = rustfft::num_complex::Complex<f64>;

use crate::error::Result;
use crate::tensor::ImageTensor;

/// Complex 2D spectrum, row-major over (u, v) frequency indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    height: usize,
    width: usize,
    shifted: bool,
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// True once `fftshift` has moved zero frequency to the grid center.
    pub fn shifted(&self) -> bool {
        self.shifted
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    #[inline]
    pub fn at(&self, u: usize, v: usize) -> Complex64 {
        self.bins[u * self.width + v]
    }
}

/// Real magnitude grid derived from a [`Spectrum`].
#[derive(Clone, Debug, PartialEq)]
pub struct MagnitudeSpectrum {
    height: usize,
    width: usize,
    shifted: bool,
    normalized: bool,
    grid: Vec<f64>,
}

impl MagnitudeSpectrum {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shifted(&self) -> bool {
        self.shifted
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
}

/// Unnormalized 2D DFT of a single-channel image:
/// F(u,v) = sum_{x,y} I(x,y) e^{-i 2 pi (u x / H + v y / W)}.
pub fn dft2(x: &ImageTensor) -> Result<Spectrum> {
    x.require_single_channel("dft2")?;
    let (h, w, _) = x.dims();
    let mut bins: Vec<Complex64> = x.as_slice().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(h, w, &mut bins);
    Ok(Spectrum { height: h, width: w, shifted: false, bins })
}

/// Permutes a row-major grid by (u,v) -> ((u + H/2) mod H, (v + W/2) mod W).
/// `inverse` applies the inverse permutation (shift by the ceil halves).
pub(crate) fn shift_grid<T: Copy + Default>(
    height: usize,
    width: usize,
    data: &[T],
    inverse: bool,
) -> Vec<T> {
    let (dy, dx) = if inverse {
        (height - height / 2, width - width / 2)
    } else {
        (height / 2, width / 2)
    };
    let mut out = vec![T::default(); data.len()];
    for u in 0..height {
        let ou = (u + dy) % height;
        for v in 0..width {
            let ov = (v + dx) % width;
            out[ou * width + ov] = data[u * width + v];
        }
    }
    out
}

/// Reorders bins so zero frequency sits at (floor(H/2), floor(W/2)).
pub fn fftshift(s: &Spectrum) -> Spectrum {
    Spectrum {
        height: s.height,
        width: s.width,
        shifted: true,
        bins: shift_grid(s.height, s.width, &s.bins, false),
    }
}

/// Exact inverse of [`fftshift`] for any (odd or even) dims.
pub fn ifftshift(s: &Spectrum) -> Spectrum {
    Spectrum {
        height: s.height,
        width: s.width,
        shifted: false,
        bins: shift_grid(s.height, s.width, &s.bins, true),
    }
}

/// ln(1 + |F|) per bin.
pub fn log_magnitude(s: &Spectrum) -> MagnitudeSpectrum {
    MagnitudeSpectrum {
        height: s.height,
        width: s.width,
        shifted: s.shifted,
        normalized: false,
        grid: s.bins.iter().map(|b| (1.0 + b.norm()).ln()).collect(),
    }
}

pub(crate) const NORM_EPS: f64 = 1e-12;

pub(crate) fn mean_and_std(grid: &[f64]) -> (f64, f64) {
    let n = grid.len() as f64;
    let mean = grid.iter().sum::<f64>() / n;
    let var = grid.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// (x - mean) / (std + 1e-12) with the population std. A constant grid maps
/// to all zeros.
pub fn normalize_spectrum(m: &MagnitudeSpectrum) -> MagnitudeSpectrum {
    let (mean, std) = mean_and_std(&m.grid);
    let inv = 1.0 / (std + NORM_EPS);
    MagnitudeSpectrum {
        height: m.height,
        width: m.width,
        shifted: m.shifted,
        normalized: true,
        grid: m.grid.iter().map(|v| (v - mean) * inv).collect(),
    }
}

/// The full magnitude pipeline for one image; shared by loss and gradient.
pub(crate) struct MagnitudePipeline {
    /// shifted complex spectrum
    pub z: Vec<Complex64>,
    /// |z|
    pub a: Vec<f64>,
    /// ln(1 + |z|)
    pub m: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// normalized output
    pub q: Vec<f64>,
}

pub(crate) fn run_pipeline(x: &ImageTensor) -> Result<MagnitudePipeline> {
    let z = fftshift(&dft2(x)?).bins;
    let a: Vec<f64> = z.iter().map(|b| b.norm()).collect();
    let m: Vec<f64> = a.iter().map(|&v| (1.0 + v).ln()).collect();
    let (mean, std) = mean_and_std(&m);
    let inv = 1.0 / (std + NORM_EPS);
    let q = m.iter().map(|v| (v - mean) * inv).collect();
    Ok(MagnitudePipeline { z, a, m, mean, std, q })
}

pub(crate) use fft::{forward as fft2_forward, inverse_unnormalized as fft2_inverse_unnormalized};

#[cfg(test)]
mod tests {
    use super::*;

    fn image(h: usize, w: usize, f: impl FnMut(usize, usize, usize) -> f64) -> ImageTensor {
        ImageTensor::from_fn(h, w, 1, f).unwrap()
    }

    #[test]
    fn constant_image_is_a_dc_spike() {
        let x = image(4, 6, |_, _, _| 2.5);
        let s = dft2(&x).unwrap();
        assert!((s.at(0, 0) - Complex64::new(2.5 * 24.0, 0.0)).norm() < 1e-9);
        for u in 0..4 {
            for v in 0..6 {
                if (u, v) != (0, 0) {
                    assert!(s.at(u, v).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn real_input_gives_conjugate_symmetry() {
        let x = image(5, 4, |y, x, _| ((y * 17 + x * 29) % 11) as f64);
        let s = dft2(&x).unwrap();
        for u in 0..5 {
            for v in 0..4 {
                let mirror = s.at((5 - u) % 5, (4 - v) % 4);
                assert!((s.at(u, v) - mirror.conj()).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn fftshift_centers_dc_and_round_trips() {
        let x = image(3, 5, |y, x, _| (y * 5 + x) as f64);
        let s = dft2(&x).unwrap();
        let sh = fftshift(&s);
        assert!(sh.shifted());
        assert_eq!(sh.at(1, 2), s.at(0, 0));
        let back = ifftshift(&sh);
        assert!(!back.shifted());
        assert_eq!(back, s);

        // even dims round trip too
        let x = image(4, 6, |y, x, _| (y * 6 + x) as f64);
        let s = dft2(&x).unwrap();
        assert_eq!(ifftshift(&fftshift(&s)), s);
        assert_eq!(fftshift(&s).at(2, 3), s.at(0, 0));
    }

    #[test]
    fn log_magnitude_of_zeros_is_zero() {
        let x = image(3, 3, |_, _, _| 0.0);
        let m = log_magnitude(&dft2(&x).unwrap());
        assert!(m.grid().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn normalize_zero_mean_unit_std() {
        let x = image(6, 6, |y, x, _| ((y * 31 + x * 7) % 13) as f64);
        let n = normalize_spectrum(&log_magnitude(&fftshift(&dft2(&x).unwrap())));
        assert!(n.normalized());
        let (mean, std) = mean_and_std(n.grid());
        assert!(mean.abs() < 1e-9);
        assert!((std - 1.0).abs() < 1e-6);
    }

    #[test]
    fn normalize_constant_grid_is_all_zeros() {
        // a zero image yields a constant (all-zero) magnitude grid
        let z = image(4, 4, |_, _, _| 0.0);
        let n = normalize_spectrum(&log_magnitude(&dft2(&z).unwrap()));
        assert!(n.grid().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn normalize_is_invariant_to_affine_input_maps() {
        // normalize(a*x + b) == sign(a) * normalize(x)
        let x = image(5, 7, |y, x, _| ((y * 13 + x * 5) % 9) as f64);
        let m = log_magnitude(&fftshift(&dft2(&x).unwrap()));
        let n = normalize_spectrum(&m);
        let scaled = MagnitudeSpectrum {
            height: m.height,
            width: m.width,
            shifted: m.shifted,
            normalized: false,
            grid: m.grid.iter().map(|v| 3.0 * v - 11.0).collect(),
        };
        let ns = normalize_spectrum(&scaled);
        for (a, b) in ns.grid().iter().zip(n.grid()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
