//! Directional filter bank built from ideal frequency wedges.
//!
//! The DFT plane is split into 2^order angular wedges covering [0, pi); a
//! frequency bin and its conjugate always land in the same wedge, so every
//! subband comes back real. The wedge masks are binary and partition the
//! plane, which gives two exact identities: the subbands sum back to the
//! input, and their energies sum to the input energy.

use crate::error::{Error, Result};
use crate::spectral::{fft2_forward, fft2_inverse_unnormalized, Complex64};
use crate::tensor::ImageTensor;

/// Wedge counts above 2^8 produce subbands with almost no support on the
/// image sizes this library targets.
pub const MAX_DFB_ORDER: usize = 8;

/// Full-rate directional subbands of a single image. `bands[k]` holds wedge
/// k, counted counterclockwise from the positive row-frequency axis.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionalSubbands {
    pub order: usize,
    pub bands: Vec<ImageTensor>,
}

impl DirectionalSubbands {
    pub fn band_count(&self) -> usize {
        self.bands.len()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_DFB_ORDER {
        return Err(Error::InvalidArgument(format!(
            "directional order must be in 1..={MAX_DFB_ORDER}, got {order}"
        )));
    }
    Ok(())
}

/// Wedge index for every frequency bin of an h x w DFT grid, row-major.
///
/// A bin and its conjugate mirror ((h-u)%h, (w-v)%w) are collapsed to the
/// lexicographically smaller index pair before any angle is computed; this
/// guarantees the two get bitwise-identical wedge assignments even on
/// Nyquist rows, where their signed coordinates are not point reflections
/// of each other.
pub(crate) fn wedge_map(h: usize, w: usize, order: usize) -> Vec<u8> {
    let wedges = 1usize << order;
    let delta = std::f64::consts::PI / wedges as f64;
    let mut map = vec![0u8; h * w];
    for u in 0..h {
        for v in 0..w {
            let conj = ((h - u) % h, (w - v) % w);
            let (cu, cv) = std::cmp::min((u, v), conj);
            let su = if cu <= h / 2 { cu as f64 } else { cu as f64 - h as f64 };
            let sv = if cv <= w / 2 { cv as f64 } else { cv as f64 - w as f64 };
            let theta = f64::atan2(sv / w as f64, su / h as f64);
            let folded = if theta < 0.0 { theta + std::f64::consts::PI } else { theta };
            let mut k = (folded / delta) as usize;
            // A bin sitting exactly on a wedge boundary belongs to the wedge
            // below it; the comparison is bitwise, so only genuinely exact
            // angles (like pi/2 against a power-of-two split) move down.
            if k >= 1 && folded == k as f64 * delta {
                k -= 1;
            }
            map[u * w + v] = k.min(wedges - 1) as u8;
        }
    }
    map
}

pub fn dfb_decompose(x: &ImageTensor, order: usize) -> Result<DirectionalSubbands> {
    x.require_single_channel("directional decomposition")?;
    check_order(order)?;
    let (h, w, _) = x.dims();
    let mut f: Vec<Complex64> = x.as_slice().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_forward(h, w, &mut f);

    let map = wedge_map(h, w, order);
    let n = (h * w) as f64;
    let mut bands = Vec::with_capacity(1 << order);
    for k in 0..1usize << order {
        let mut masked: Vec<Complex64> = f
            .iter()
            .zip(&map)
            .map(|(&z, &m)| if usize::from(m) == k { z } else { Complex64::new(0.0, 0.0) })
            .collect();
        fft2_inverse_unnormalized(h, w, &mut masked);
        bands.push(ImageTensor::from_fn(h, w, 1, |y, xx, _| masked[y * w + xx].re / n)?);
    }
    Ok(DirectionalSubbands { order, bands })
}

/// Inverse of [`dfb_decompose`]: the wedges partition the spectrum, so the
/// bands just add back up.
pub fn dfb_reconstruct(s: &DirectionalSubbands) -> Result<ImageTensor> {
    check_order(s.order)?;
    if s.bands.len() != 1 << s.order {
        return Err(Error::Shape(format!(
            "order {} needs {} bands, got {}",
            s.order,
            1usize << s.order,
            s.bands.len()
        )));
    }
    let first = &s.bands[0];
    let (h, w, c) = first.dims();
    for b in &s.bands[1..] {
        first.require_same_dims(b, "directional bands")?;
    }
    ImageTensor::from_fn(h, w, c, |y, x, ch| s.bands.iter().map(|b| b.get(y, x, ch)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise(h: usize, w: usize, seed: u64) -> ImageTensor {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ImageTensor::from_fn(h, w, 1, |_, _, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .unwrap()
    }

    #[test]
    fn wedge_map_is_conjugate_symmetric_and_complete() {
        for (h, w) in [(6, 8), (5, 7), (8, 8), (4, 6)] {
            for order in 1..=3 {
                let map = wedge_map(h, w, order);
                for u in 0..h {
                    for v in 0..w {
                        let k = map[u * w + v];
                        assert!((k as usize) < (1 << order));
                        assert_eq!(k, map[((h - u) % h) * w + (w - v) % w], "({u},{v}) {h}x{w}");
                    }
                }
                assert_eq!(map[0], 0, "DC belongs to wedge 0");
            }
        }
    }

    #[test]
    fn every_wedge_is_hit_on_a_large_grid() {
        let map = wedge_map(64, 64, 4);
        let mut seen = [false; 16];
        for &k in &map {
            seen[k as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn round_trip_and_energy_partition() {
        for (h, w) in [(16, 16), (9, 13), (8, 12)] {
            for order in 1..=4 {
                let x = noise(h, w, (h * 31 + w + order) as u64);
                let s = dfb_decompose(&x, order).unwrap();
                assert_eq!(s.bands.len(), 1 << order);

                let r = dfb_reconstruct(&s).unwrap();
                let err = x
                    .as_slice()
                    .iter()
                    .zip(r.as_slice())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(err < 1e-12, "{h}x{w} d{order}: {err}");

                let band_energy: f64 = s.bands.iter().map(ImageTensor::energy).sum();
                let rel = (band_energy - x.energy()).abs() / x.energy();
                assert!(rel < 1e-12, "{h}x{w} d{order}: energy drift {rel}");
            }
        }
    }

    #[test]
    fn pure_horizontal_frequency_lands_in_wedge_one_at_order_two() {
        // spectrum support at (0, 3) and (0, w-3): angle pi/2, which sits on
        // the wedge 1 / wedge 2 boundary and must resolve downward
        let (h, w) = (16, 16);
        let x = ImageTensor::from_fn(h, w, 1, |_, xx, _| {
            (2.0 * std::f64::consts::PI * 3.0 * xx as f64 / w as f64).sin()
        })
        .unwrap();
        let s = dfb_decompose(&x, 2).unwrap();
        let total = x.energy();
        for (k, band) in s.bands.iter().enumerate() {
            let share = band.energy() / total;
            if k == 1 {
                assert!(share > 1.0 - 1e-9, "wedge 1 share {share}");
            } else {
                assert!(share < 1e-12, "wedge {k} share {share}");
            }
        }
    }

    #[test]
    fn pure_vertical_frequency_lands_in_wedge_zero() {
        // spectrum support at (2, 0) and (h-2, 0): angle 0
        let (h, w) = (12, 10);
        let x = ImageTensor::from_fn(h, w, 1, |y, _, _| {
            (2.0 * std::f64::consts::PI * 2.0 * y as f64 / h as f64).cos()
        })
        .unwrap();
        let s = dfb_decompose(&x, 2).unwrap();
        let share = s.bands[0].energy() / x.energy();
        assert!(share > 1.0 - 1e-9, "wedge 0 share {share}");
    }

    #[test]
    fn rejects_bad_orders_and_shapes() {
        let x = noise(8, 8, 1);
        assert!(matches!(dfb_decompose(&x, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(dfb_decompose(&x, 9), Err(Error::InvalidArgument(_))));

        let rgb = ImageTensor::zeros(8, 8, 3);
        assert!(dfb_decompose(&rgb, 2).is_err());

        let mut s = dfb_decompose(&x, 2).unwrap();
        s.bands.pop();
        assert!(matches!(dfb_reconstruct(&s), Err(Error::Shape(_))));

        let mut s = dfb_decompose(&x, 1).unwrap();
        s.bands[1] = ImageTensor::zeros(4, 4, 1);
        assert!(dfb_reconstruct(&s).is_err());
    }
}
