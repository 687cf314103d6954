//! Fidelity metrics: MSE, PSNR, and mean SSIM.

use crate::error::{Error, Result};
use crate::tensor::ImageTensor;
use crate::util::sig17;

/// Below this MSE, PSNR is reported as infinite.
pub const PSNR_ZERO_MSE: f64 = 1e-15;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;
const SSIM_L: f64 = 255.0;

/// Mean of squared differences over all elements.
pub fn mse(a: &ImageTensor, b: &ImageTensor) -> Result<f64> {
    a.require_same_dims(b, "mse")?;
    let sum: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.len() as f64)
}

/// 10 log10(peak^2 / mse); +inf for (near-)identical inputs.
pub fn psnr(a: &ImageTensor, b: &ImageTensor, peak: f64) -> Result<f64> {
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::InvalidArgument(format!("peak must be positive, got {peak}")));
    }
    let e = mse(a, b)?;
    if e < PSNR_ZERO_MSE {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / e).log10())
}

/// Mean local SSIM over all fully-interior 11x11 Gaussian windows
/// (sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 255). Multi-channel
/// inputs are scored per channel and averaged.
pub fn ssim(a: &ImageTensor, b: &ImageTensor) -> Result<f64> {
    a.require_same_dims(b, "ssim")?;
    let (h, w, c) = a.dims();
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::DegenerateSize(format!(
            "ssim needs at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {h}x{w}"
        )));
    }
    let window = gaussian_window();
    let c1 = (SSIM_K1 * SSIM_L) * (SSIM_K1 * SSIM_L);
    let c2 = (SSIM_K2 * SSIM_L) * (SSIM_K2 * SSIM_L);

    let mut total = 0.0;
    for ch in 0..c {
        let mut acc = 0.0;
        let mut count = 0usize;
        for y0 in 0..=(h - SSIM_WINDOW) {
            for x0 in 0..=(w - SSIM_WINDOW) {
                let (mut ma, mut mb, mut maa, mut mbb, mut mab) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for dy in 0..SSIM_WINDOW {
                    for dx in 0..SSIM_WINDOW {
                        let wgt = window[dy * SSIM_WINDOW + dx];
                        let va = a.get(y0 + dy, x0 + dx, ch);
                        let vb = b.get(y0 + dy, x0 + dx, ch);
                        ma += wgt * va;
                        mb += wgt * vb;
                        maa += wgt * va * va;
                        mbb += wgt * vb * vb;
                        mab += wgt * va * vb;
                    }
                }
                let va = maa - ma * ma;
                let vb = mbb - mb * mb;
                let cov = mab - ma * mb;
                let num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
                let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
                acc += num / den;
                count += 1;
            }
        }
        total += acc / count as f64;
    }
    Ok(total / c as f64)
}

/// Normalized 11x11 Gaussian weights.
fn gaussian_window() -> Vec<f64> {
    let r = (SSIM_WINDOW / 2) as f64;
    let mut w = Vec::with_capacity(SSIM_WINDOW * SSIM_WINDOW);
    for y in 0..SSIM_WINDOW {
        for x in 0..SSIM_WINDOW {
            let dy = y as f64 - r;
            let dx = x as f64 - r;
            w.push((-(dy * dy + dx * dx) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp());
        }
    }
    let sum: f64 = w.iter().sum();
    for v in &mut w {
        *v /= sum;
    }
    w
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricReport {
    pub psnr: f64,
    pub mse: f64,
    pub ssim: f64,
}

impl MetricReport {
    pub fn compute(a: &ImageTensor, b: &ImageTensor, peak: f64) -> Result<Self> {
        Ok(Self { psnr: psnr(a, b, peak)?, mse: mse(a, b)?, ssim: ssim(a, b)? })
    }

    /// One-line JSON. Finite numbers carry 17 significant digits; an
    /// infinite PSNR is the string "inf".
    pub fn to_json(&self) -> String {
        let psnr = if self.psnr.is_infinite() {
            "\"inf\"".to_string()
        } else {
            sig17(self.psnr)
        };
        format!(
            "{{\"psnr\": {psnr}, \"mse\": {}, \"ssim\": {}}}",
            sig17(self.mse),
            sig17(self.ssim)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(h: usize, w: usize, v: f64) -> ImageTensor {
        ImageTensor::from_fn(h, w, 1, |_, _, _| v).unwrap()
    }

    #[test]
    fn mse_of_uniform_difference() {
        let a = uniform(4, 4, 100.0);
        let b = uniform(4, 4, 116.0);
        assert_eq!(mse(&a, &b).unwrap(), 256.0);
        assert_eq!(mse(&b, &a).unwrap(), 256.0);
    }

    #[test]
    fn psnr_of_uniform_16_difference_at_peak_255() {
        let a = uniform(8, 8, 10.0);
        let b = uniform(8, 8, 26.0);
        let p = psnr(&a, &b, 255.0).unwrap();
        assert!((p - 24.0486).abs() <= 1e-3, "psnr {p}");
    }

    #[test]
    fn halving_the_error_adds_six_db() {
        let a = uniform(8, 8, 0.0);
        let p16 = psnr(&a, &uniform(8, 8, 16.0), 255.0).unwrap();
        let p8 = psnr(&a, &uniform(8, 8, 8.0), 255.0).unwrap();
        assert!((p8 - p16 - 20.0 * 2f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn identical_images_give_infinite_psnr() {
        let a = uniform(4, 4, 42.0);
        assert!(psnr(&a, &a, 255.0).unwrap().is_infinite());
    }

    #[test]
    fn psnr_validates_peak() {
        let a = uniform(4, 4, 0.0);
        assert!(psnr(&a, &a, 0.0).is_err());
        assert!(psnr(&a, &a, -1.0).is_err());
        assert!(psnr(&a, &a, f64::NAN).is_err());
    }

    #[test]
    fn ssim_self_is_exactly_one() {
        let x = ImageTensor::from_fn(16, 16, 1, |y, x, _| ((y * 37 + x * 13) % 256) as f64)
            .unwrap();
        assert!((ssim(&x, &x).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn ssim_against_constant_is_below_one() {
        let x = ImageTensor::from_fn(16, 16, 1, |y, x, _| ((y * 37 + x * 13) % 256) as f64)
            .unwrap();
        let flat = uniform(16, 16, 128.0);
        let s = ssim(&x, &flat).unwrap();
        assert!(s < 1.0);
    }

    #[test]
    fn ssim_needs_a_full_window() {
        let a = uniform(10, 16, 0.0);
        assert!(matches!(ssim(&a, &a), Err(Error::DegenerateSize(_))));
    }

    #[test]
    fn report_json_format() {
        let a = uniform(16, 16, 0.0);
        let r = MetricReport::compute(&a, &a, 255.0).unwrap();
        assert_eq!(
            r.to_json(),
            "{\"psnr\": \"inf\", \"mse\": 0.0000000000000000e0, \"ssim\": 1.0000000000000000e0}"
        );
        let b = uniform(16, 16, 16.0);
        let r = MetricReport::compute(&a, &b, 255.0).unwrap();
        assert!(r.to_json().starts_with("{\"psnr\": 2.404"));
    }
}
