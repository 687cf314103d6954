//! Radially averaged log magnitude profile.

use super::{dft2, fftshift, log_magnitude};
use crate::error::{Error, Result};
use crate::tensor::ImageTensor;
use crate::util::sig17;

/// Largest normalized radius on any grid: sqrt(0.5^2 + 0.5^2).
const R_MAX: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug, PartialEq)]
pub struct RadialHistogram {
    /// nbins + 1 edges, increasing from 0 to 0.5*sqrt(2).
    pub bin_edges: Vec<f64>,
    /// Frequency bins falling into each radial bin; sums to H*W.
    pub counts: Vec<u64>,
    /// Mean ln(1 + |F|) per radial bin; 0 for empty bins.
    pub mean_log_mag: Vec<f64>,
}

impl RadialHistogram {
    pub fn nbins(&self) -> usize {
        self.counts.len()
    }

    /// CSV with a header row; floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius_lo,radius_hi,count,mean_log_mag\n");
        for i in 0..self.nbins() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                sig17(self.bin_edges[i]),
                sig17(self.bin_edges[i + 1]),
                self.counts[i],
                sig17(self.mean_log_mag[i])
            ));
        }
        out
    }
}

/// Bins every shifted frequency sample by its normalized radius
/// sqrt((fu/H)^2 + (fv/W)^2) into `nbins` equal-width bins over [0, R_MAX]
/// and averages the log magnitude within each bin.
pub fn radial_spectrum(x: &ImageTensor, nbins: usize) -> Result<RadialHistogram> {
    if nbins == 0 {
        return Err(Error::InvalidArgument("need at least one radial bin".into()));
    }
    let m = log_magnitude(&fftshift(&dft2(x)?));
    let (h, w) = (m.height(), m.width());
    let mut counts = vec![0u64; nbins];
    let mut sums = vec![0.0; nbins];
    for i in 0..h {
        let fu = (i as isize - (h / 2) as isize) as f64 / h as f64;
        for j in 0..w {
            let fv = (j as isize - (w / 2) as isize) as f64 / w as f64;
            let r = (fu * fu + fv * fv).sqrt();
            let bin = ((r / R_MAX) * nbins as f64) as usize;
            let bin = bin.min(nbins - 1);
            counts[bin] += 1;
            sums[bin] += m.grid()[i * w + j];
        }
    }
    let mean_log_mag = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
        .collect();
    let bin_edges = (0..=nbins).map(|k| R_MAX * k as f64 / nbins as f64).collect();
    Ok(RadialHistogram { bin_edges, counts, mean_log_mag })
}
