//! 2D FFT plumbing on flat complex buffers.
//!
//! rustfft supplies the 1D transforms (mixed radix, works for any length);
//! rows are transformed in place and columns via transpose. Nothing here
//! normalizes: forward matches the plain double-sum DFT, and the inverse is
//! the conjugate-kernel sum without the 1/(H*W) factor.

use rustfft::FftPlanner;

pub type C64 = rustfft::num_complex::Complex<f64>;

fn transpose(rows: usize, cols: usize, data: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

fn fft2_in_place(height: usize, width: usize, data: &mut Vec<C64>, inverse: bool) {
    debug_assert_eq!(data.len(), height * width);
    let mut planner = FftPlanner::new();
    let row_fft = if inverse {
        planner.plan_fft_inverse(width)
    } else {
        planner.plan_fft_forward(width)
    };
    row_fft.process(data);
    let mut t = transpose(height, width, data);
    let col_fft = if inverse {
        planner.plan_fft_inverse(height)
    } else {
        planner.plan_fft_forward(height)
    };
    col_fft.process(&mut t);
    *data = transpose(width, height, &t);
}

/// F(u,v) = sum_{x,y} I(x,y) e^{-i2pi(ux/H + vy/W)}; x indexes rows.
pub(crate) fn forward(height: usize, width: usize, data: &mut Vec<C64>) {
    fft2_in_place(height, width, data, false);
}

/// Unnormalized inverse: sum over the positive-exponent kernel. Divide by
/// H*W to invert `forward`.
pub(crate) fn inverse_unnormalized(height: usize, width: usize, data: &mut Vec<C64>) {
    fft2_in_place(height, width, data, true);
}
