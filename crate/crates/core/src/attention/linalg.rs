//! Row-major matrix scratch used by the attention blocks.
//!
//! Everything here is crate-internal plumbing: shapes are validated at the
//! public API boundary, so dimension slips inside the blocks are programmer
//! errors and assert.

pub(crate) const LN_EPS: f64 = 1e-5;

#[derive(Clone, Debug)]
pub(crate) struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs.at(k, c);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.at(r, c));
            }
        }
        out
    }

    /// Columns [lo, hi) as their own matrix.
    pub fn col_slice(&self, lo: usize, hi: usize) -> Mat {
        assert!(lo < hi && hi <= self.cols);
        let mut out = Mat::zeros(self.rows, hi - lo);
        for r in 0..self.rows {
            for c in lo..hi {
                out.set(r, c - lo, self.at(r, c));
            }
        }
        out
    }

    /// Write `block` into columns starting at `lo`.
    pub fn set_cols(&mut self, lo: usize, block: &Mat) {
        assert_eq!(self.rows, block.rows);
        assert!(lo + block.cols <= self.cols);
        for r in 0..self.rows {
            for c in 0..block.cols {
                self.set(r, lo + c, block.at(r, c));
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }
}

/// Stable softmax along each row: shift by the row max before
/// exponentiating.
pub(crate) fn softmax_rows_in_place(m: &mut Mat) {
    for r in 0..m.rows {
        let row = &mut m.data[r * m.cols..(r + 1) * m.cols];
        let max = row.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
}

/// Per-row standardization with epsilon inside the square root and no
/// learned affine: (v - mean) / sqrt(var + LN_EPS).
pub(crate) fn layer_norm_rows(m: &Mat) -> Mat {
    let mut out = Mat::zeros(m.rows, m.cols);
    let n = m.cols as f64;
    for r in 0..m.rows {
        let row = m.row(r);
        let mean = row.iter().sum::<f64>() / n;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let inv = 1.0 / (var + LN_EPS).sqrt();
        for c in 0..m.cols {
            out.set(r, c, (row[c] - mean) * inv);
        }
    }
    out
}

/// Exact gaussian error linear unit, no tanh approximation.
pub(crate) fn gelu(t: f64) -> f64 {
    0.5 * t * (1.0 + libm::erf(t / std::f64::consts::SQRT_2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_against_hand_computation() {
        let a = Mat::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = Mat::from_vec(3, 2, vec![7.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
        let c = a.matmul(&b);
        assert_eq!(c.data, vec![58.0, 64.0, 139.0, 154.0]);
    }

    #[test]
    fn softmax_rows_sum_to_one_and_shift_invariant() {
        let mut m = Mat::from_vec(2, 3, vec![1.0, 2.0, 3.0, 1000.0, 1001.0, 999.0]);
        softmax_rows_in_place(&mut m);
        for r in 0..2 {
            let s: f64 = m.row(r).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        // the huge row must not overflow: same logits shifted by 999
        let mut small = Mat::from_vec(1, 3, vec![1.0, 2.0, 0.0]);
        softmax_rows_in_place(&mut small);
        for c in 0..3 {
            assert!((m.at(1, c) - small.at(0, c)).abs() < 1e-12);
        }
    }

    #[test]
    fn layer_norm_standardizes_high_variance_rows() {
        // epsilon is 1e-5, so rows need variance well above it for the
        // normalized variance to land within 1e-6 of one
        let mut state = 99u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 40.0
        };
        let m = Mat::from_vec(3, 64, (0..192).map(|_| next()).collect());
        let ln = layer_norm_rows(&m);
        for r in 0..3 {
            let row = ln.row(r);
            let mean = row.iter().sum::<f64>() / 64.0;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 64.0;
            assert!(mean.abs() < 1e-12, "row {r} mean {mean}");
            assert!((var - 1.0).abs() < 1e-6, "row {r} var {var}");
        }
    }

    #[test]
    fn gelu_frozen_values() {
        assert_eq!(gelu(0.0), 0.0);
        assert!((gelu(1.0) - 0.8413447460685429).abs() < 1e-15);
        assert!((gelu(-1.0) + 0.15865525393145707).abs() < 1e-15);
        // gelu(t) = t * Phi(t) and Phi(t) + Phi(-t) = 1, so the two sides
        // differ by exactly t
        for t in [0.3, 1.7, 4.2] {
            assert!((gelu(t) - gelu(-t) - t).abs() < 1e-14);
        }
    }

    #[test]
    fn col_slices_round_trip() {
        let m = Mat::from_vec(2, 4, (0..8).map(f64::from).collect());
        let left = m.col_slice(0, 2);
        let right = m.col_slice(2, 4);
        let mut back = Mat::zeros(2, 4);
        back.set_cols(0, &left);
        back.set_cols(2, &right);
        assert_eq!(back.data, m.data);
    }
}
