//! Spectral fidelity loss: mean squared error between the normalized log
//! magnitude spectra of two images, plus its analytic gradient with respect
//! to the second image.

use super::{run_pipeline, shift_grid, Complex64, NORM_EPS};
use crate::error::Result;
use crate::tensor::ImageTensor;

/// L = mean_bins (P - Q)^2 where P, Q are the normalized log magnitude
/// spectra of `hr` and `sr`. Zero iff the normalized spectra coincide; in
/// particular identical images give exactly 0.
pub fn spectral_fidelity_loss(hr: &ImageTensor, sr: &ImageTensor) -> Result<f64> {
    hr.require_same_dims(sr, "spectral_fidelity_loss")?;
    let p = run_pipeline(hr)?;
    let q = run_pipeline(sr)?;
    let n = p.q.len() as f64;
    Ok(p.q.iter().zip(&q.q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n)
}

/// dL/d(sr) as an image-shaped gradient, backpropagated through normalize,
/// log magnitude, the center shift, and the DFT.
pub fn spectral_fidelity_grad(hr: &ImageTensor, sr: &ImageTensor) -> Result<ImageTensor> {
    hr.require_same_dims(sr, "spectral_fidelity_grad")?;
    let (h, w, _) = sr.dims();
    let n = (h * w) as f64;
    let p = run_pipeline(hr)?;
    let q = run_pipeline(sr)?;

    // loss stage: dL/dq_i = 2 (q_i - p_i) / n
    let g_q: Vec<f64> = q.q.iter().zip(&p.q).map(|(qi, pi)| 2.0 * (qi - pi) / n).collect();

    // normalize stage: q_i = c (m_i - mu), c = 1/(std + eps)
    // dL/dm_j = c (g_j - mean(g)) - c^2 dot (m_j - mu) / (n std)
    //   with dot = sum_i g_i (m_i - mu)
    let c = 1.0 / (q.std + NORM_EPS);
    let g_mean = g_q.iter().sum::<f64>() / n;
    let dot: f64 = g_q.iter().zip(&q.m).map(|(g, m)| g * (m - q.mean)).sum();
    let std_term = if q.std > 0.0 { c * c * dot / (n * q.std) } else { 0.0 };
    let g_m: Vec<f64> = g_q
        .iter()
        .zip(&q.m)
        .map(|(g, m)| c * (g - g_mean) - std_term * (m - q.mean))
        .collect();

    // log magnitude stage, then |z|: the complex cotangent is
    // (dL/dm) / (1 + a) * z / a; zero bins get zero (subgradient).
    let mut g_z: Vec<Complex64> = g_m
        .iter()
        .zip(q.a.iter().zip(&q.z))
        .map(|(g, (&a, z))| {
            if a == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                z * (g / ((1.0 + a) * a))
            }
        })
        .collect();

    // undo the center shift, then pull back through the DFT: for real input
    // the gradient is Re of the unnormalized inverse transform.
    g_z = shift_grid(h, w, &g_z, true);
    super::fft2_inverse_unnormalized(h, w, &mut g_z);
    ImageTensor::from_fn(h, w, 1, |y, x, _| g_z[y * w + x].re)
}
