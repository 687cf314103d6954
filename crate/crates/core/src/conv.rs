//! Small spatial convolutions with explicit border handling.
//!
//! Taps are applied centered (odd lengths only) and are *correlation*
//! oriented; every kernel in this crate is symmetric, so the distinction
//! never matters, but it keeps index arithmetic honest.

use crate::error::{Error, Result};
use crate::tensor::{resolve_index, BorderPolicy, ImageTensor};

/// Convolves along x with centered odd-length taps; output dims unchanged.
pub fn conv_rows(x: &ImageTensor, taps: &[f64], policy: BorderPolicy) -> ImageTensor {
    assert!(taps.len() % 2 == 1, "taps must have odd length");
    let (h, w, c) = x.dims();
    let r = (taps.len() / 2) as isize;
    let mut out = ImageTensor::zeros(h, w, c);
    for y in 0..h {
        for ox in 0..w {
            for ch in 0..c {
                let mut acc = 0.0;
                for (t, &k) in taps.iter().enumerate() {
                    if let Some(sx) = resolve_index(ox as isize + t as isize - r, w, policy) {
                        acc += k * x.get(y, sx, ch);
                    }
                }
                out.set(y, ox, ch, acc);
            }
        }
    }
    out
}

/// Convolves along y with centered odd-length taps; output dims unchanged.
pub fn conv_cols(x: &ImageTensor, taps: &[f64], policy: BorderPolicy) -> ImageTensor {
    assert!(taps.len() % 2 == 1, "taps must have odd length");
    let (h, w, c) = x.dims();
    let r = (taps.len() / 2) as isize;
    let mut out = ImageTensor::zeros(h, w, c);
    for oy in 0..h {
        for x0 in 0..w {
            for ch in 0..c {
                let mut acc = 0.0;
                for (t, &k) in taps.iter().enumerate() {
                    if let Some(sy) = resolve_index(oy as isize + t as isize - r, h, policy) {
                        acc += k * x.get(sy, x0, ch);
                    }
                }
                out.set(oy, x0, ch, acc);
            }
        }
    }
    out
}

/// Separable filter: same taps along both axes.
pub fn separable_conv(x: &ImageTensor, taps: &[f64], policy: BorderPolicy) -> ImageTensor {
    conv_cols(&conv_rows(x, taps, policy), taps, policy)
}

/// Full 3x3 convolution mapping `in_c` to `out_c` channels. Weights are
/// indexed `[oc][ic][ky][kx]`, flattened.
pub fn conv3x3(
    x: &ImageTensor,
    weights: &[f64],
    out_c: usize,
    policy: BorderPolicy,
) -> Result<ImageTensor> {
    let (h, w, in_c) = x.dims();
    if out_c == 0 || weights.len() != out_c * in_c * 9 {
        return Err(Error::Shape(format!(
            "conv3x3 wants {out_c}x{in_c}x3x3 = {} weights, got {}",
            out_c * in_c * 9,
            weights.len()
        )));
    }
    let mut out = ImageTensor::zeros(h, w, out_c);
    for oy in 0..h {
        for ox in 0..w {
            for oc in 0..out_c {
                let mut acc = 0.0;
                for ic in 0..in_c {
                    let base = (oc * in_c + ic) * 9;
                    for ky in 0..3usize {
                        let sy = resolve_index(oy as isize + ky as isize - 1, h, policy);
                        let Some(sy) = sy else { continue };
                        for kx in 0..3usize {
                            let sx = resolve_index(ox as isize + kx as isize - 1, w, policy);
                            if let Some(sx) = sx {
                                acc += weights[base + ky * 3 + kx] * x.get(sy, sx, ic);
                            }
                        }
                    }
                }
                out.set(oy, ox, oc, acc);
            }
        }
    }
    Ok(out)
}

/// Depth-wise 3x3: one 3x3 kernel per channel, flattened `[c][ky][kx]`.
pub fn depthwise3x3(x: &ImageTensor, weights: &[f64], policy: BorderPolicy) -> Result<ImageTensor> {
    let (h, w, c) = x.dims();
    if weights.len() != c * 9 {
        return Err(Error::Shape(format!(
            "depthwise3x3 wants {c}x3x3 = {} weights, got {}",
            c * 9,
            weights.len()
        )));
    }
    let mut out = ImageTensor::zeros(h, w, c);
    for oy in 0..h {
        for ox in 0..w {
            for ch in 0..c {
                let base = ch * 9;
                let mut acc = 0.0;
                for ky in 0..3usize {
                    let sy = resolve_index(oy as isize + ky as isize - 1, h, policy);
                    let Some(sy) = sy else { continue };
                    for kx in 0..3usize {
                        let sx = resolve_index(ox as isize + kx as isize - 1, w, policy);
                        if let Some(sx) = sx {
                            acc += weights[base + ky * 3 + kx] * x.get(sy, sx, ch);
                        }
                    }
                }
                out.set(oy, ox, ch, acc);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_taps_are_identity() {
        let x = ImageTensor::from_fn(3, 4, 2, |y, x, c| (y * 13 + x * 3 + c) as f64).unwrap();
        assert_eq!(separable_conv(&x, &[0.0, 1.0, 0.0], BorderPolicy::Symmetric), x);
    }

    #[test]
    fn matches_dense_oracle_on_extended_image() {
        // separable_conv must equal: extend_border, then a plain valid-mode
        // separable pass.
        let taps = [0.25, 0.5, 0.25];
        let x = ImageTensor::from_fn(5, 4, 1, |y, x, _| ((y * 7 + x * 11) % 5) as f64).unwrap();
        for policy in [BorderPolicy::Symmetric, BorderPolicy::Replicate, BorderPolicy::Zero] {
            let got = separable_conv(&x, &taps, policy);
            let ext = crate::tensor::extend_border(&x, 1, policy);
            for oy in 0..5 {
                for ox in 0..4 {
                    let mut acc = 0.0;
                    for (ty, &ky) in taps.iter().enumerate() {
                        for (tx, &kx) in taps.iter().enumerate() {
                            acc += ky * kx * ext.get(oy + ty, ox + tx, 0);
                        }
                    }
                    assert!((got.get(oy, ox, 0) - acc).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn conv3x3_delta_kernel_selects_channel() {
        let x = ImageTensor::from_fn(3, 3, 2, |y, x, c| (y * 10 + x + 100 * c) as f64).unwrap();
        // out channel 0 = centered delta on input channel 1
        let mut w = vec![0.0; 2 * 9];
        w[9 + 4] = 1.0;
        let out = conv3x3(&x, &w, 1, BorderPolicy::Symmetric).unwrap();
        for y in 0..3 {
            for xx in 0..3 {
                assert_eq!(out.get(y, xx, 0), x.get(y, xx, 1));
            }
        }
    }

    #[test]
    fn depthwise_delta_is_identity() {
        let x = ImageTensor::from_fn(4, 3, 3, |y, x, c| (y + 5 * x + 17 * c) as f64).unwrap();
        let mut w = vec![0.0; 3 * 9];
        for c in 0..3 {
            w[c * 9 + 4] = 1.0;
        }
        assert_eq!(depthwise3x3(&x, &w, BorderPolicy::Symmetric).unwrap(), x);
    }

    #[test]
    fn weight_length_is_checked() {
        let x = ImageTensor::zeros(2, 2, 2);
        assert!(conv3x3(&x, &[0.0; 17], 1, BorderPolicy::Zero).is_err());
        assert!(depthwise3x3(&x, &[0.0; 9], BorderPolicy::Zero).is_err());
    }
}
