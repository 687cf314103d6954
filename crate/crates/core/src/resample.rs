//! Bicubic rescaling and sub-pixel shuffling.

use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

/// Keys bicubic kernel with a = -0.5 (Catmull-Rom), support 2.
fn keys(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x < 1.0 {
        (A + 2.0) * x * x * x - (A + 3.0) * x * x + 1.0
    } else if x < 2.0 {
        A * (x * x * x - 5.0 * x * x + 8.0 * x - 4.0)
    } else {
        0.0
    }
}

/// One axis of the resize: for every output coordinate, the clamped source
/// window and normalized weights.
struct AxisPlan {
    starts: Vec<usize>,
    weights: Vec<Vec<f64>>,
}

fn plan_axis(n_in: usize, n_out: usize, scale: f64) -> AxisPlan {
    // Antialias on downscale: stretch the kernel by the inverse scale so its
    // footprint covers the source samples that collapse onto one output.
    let filter_scale = (1.0 / scale).max(1.0);
    let support = 2.0 * filter_scale;
    let mut starts = Vec::with_capacity(n_out);
    let mut weights = Vec::with_capacity(n_out);
    for o in 0..n_out {
        // pixel-center mapping keeps scale 1 an exact identity
        let center = (o as f64 + 0.5) / scale - 0.5;
        let lo = (center - support).ceil() as isize;
        let hi = (center + support).floor() as isize;
        let mut w = Vec::with_capacity((hi - lo + 1).max(0) as usize);
        let mut sum = 0.0;
        for i in lo..=hi {
            let k = keys((i as f64 - center) / filter_scale);
            w.push(k);
            sum += k;
        }
        for k in &mut w {
            *k /= sum;
        }
        // source indices clamp to the edge (replicate)
        let start = lo.clamp(0, n_in as isize - 1) as usize;
        let end = hi.clamp(0, n_in as isize - 1) as usize;
        let mut clamped = vec![0.0; end - start + 1];
        for (j, k) in w.iter().enumerate() {
            let src = (lo + j as isize).clamp(0, n_in as isize - 1) as usize;
            clamped[src - start] += k;
        }
        starts.push(start);
        weights.push(clamped);
    }
    AxisPlan { starts, weights }
}

/// Resizes by a positive factor with the Keys a = -0.5 kernel, pixel-center
/// coordinate mapping, edge replication, and antialias prefiltering on
/// downscale. Output dims are `round(dim * scale)`.
pub fn bicubic_resize(x: &ImageTensor, scale: f64) -> Result<ImageTensor> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
    }
    let (h, w, c) = x.dims();
    let out_h = (h as f64 * scale).round() as usize;
    let out_w = (w as f64 * scale).round() as usize;
    if out_h == 0 || out_w == 0 {
        return Err(Error::DegenerateSize(format!(
            "scale {scale} shrinks {h}x{w} to {out_h}x{out_w}"
        )));
    }

    // horizontal pass
    let xplan = plan_axis(w, out_w, scale);
    let mut mid = ImageTensor::zeros(h, out_w, c);
    for y in 0..h {
        for ox in 0..out_w {
            let start = xplan.starts[ox];
            let wts = &xplan.weights[ox];
            for ch in 0..c {
                let mut acc = 0.0;
                for (j, &k) in wts.iter().enumerate() {
                    acc += k * x.get(y, start + j, ch);
                }
                mid.set(y, ox, ch, acc);
            }
        }
    }

    // vertical pass
    let yplan = plan_axis(h, out_h, scale);
    let mut out = ImageTensor::zeros(out_h, out_w, c);
    for oy in 0..out_h {
        let start = yplan.starts[oy];
        let wts = &yplan.weights[oy];
        for ox in 0..out_w {
            for ch in 0..c {
                let mut acc = 0.0;
                for (j, &k) in wts.iter().enumerate() {
                    acc += k * mid.get(start + j, ox, ch);
                }
                out.set(oy, ox, ch, acc);
            }
        }
    }
    Ok(out)
}

/// Rearranges channel blocks into space: channel `c*s*s + dy*s + dx` at
/// (y, x) moves to channel `c` at (y*s + dy, x*s + dx). Inverse of stacking
/// an image into s*s phase channels.
pub fn pixel_shuffle(x: &ImageTensor, s: usize) -> Result<ImageTensor> {
    if s == 0 {
        return Err(Error::InvalidArgument("shuffle factor must be >= 1".into()));
    }
    let (h, w, c) = x.dims();
    if c % (s * s) != 0 {
        return Err(Error::Shape(format!("{c} channels not divisible by {s}x{s}", s = s)));
    }
    let out_c = c / (s * s);
    let mut out = ImageTensor::zeros(h * s, w * s, out_c);
    for y in 0..h {
        for xx in 0..w {
            for oc in 0..out_c {
                for dy in 0..s {
                    for dx in 0..s {
                        let v = x.get(y, xx, oc * s * s + dy * s + dx);
                        out.set(y * s + dy, xx * s + dx, oc, v);
                    }
                }
            }
        }
    }
    Ok(out)
}
