//! Perfect-reconstruction sweeps for the pyramid and the full transform,
//! plus a dense-arithmetic oracle for the decomposition itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermolet_core::contourlet::{
    contourlet_decompose, contourlet_decompose_with, contourlet_reconstruct,
    contourlet_reconstruct_with, lp_decompose, lp_reconstruct, GaussianKernel,
};
use thermolet_core::ImageTensor;

fn noise(height: usize, width: usize, seed: u64) -> ImageTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..height * width).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    ImageTensor::new(height, width, 1, data).unwrap()
}

fn max_abs_diff(a: &ImageTensor, b: &ImageTensor) -> f64 {
    assert_eq!(a.dims(), b.dims());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn laplacian_pyramid_round_trips_across_shapes_and_depths() {
    let h = GaussianKernel::binomial5();
    for &(rows, cols) in &[(64, 64), (33, 47), (16, 16), (8, 12), (21, 35)] {
        let max_levels = usize::min(rows, cols).ilog2() as usize;
        for levels in 1..=max_levels.min(4) {
            let x = noise(rows, cols, 0x517 + rows as u64 * 31 + levels as u64);
            let p = lp_decompose(&x, levels, &h).unwrap();
            let y = lp_reconstruct(&p, &h).unwrap();
            let err = max_abs_diff(&x, &y);
            assert!(err <= 1e-9, "{rows}x{cols} L{levels}: err {err:e}");
        }
    }
}

#[test]
fn contourlet_round_trips_across_direction_specs() {
    for &(rows, cols) in &[(64, 64), (48, 40), (33, 47)] {
        for spec in [&[1usize][..], &[3], &[2, 3], &[4, 3, 2], &[1, 2, 3, 4]] {
            if usize::min(rows, cols) >> spec.len() == 0 {
                continue;
            }
            let x = noise(rows, cols, 0xC0 + rows as u64 + spec.len() as u64 * 977);
            let c = contourlet_decompose(&x, spec).unwrap();
            let y = contourlet_reconstruct(&c).unwrap();
            let err = max_abs_diff(&x, &y);
            assert!(err <= 1e-6, "{rows}x{cols} {spec:?}: err {err:e}");
        }
    }
}

#[test]
fn reconstruction_requires_the_analysis_kernel() {
    let x = noise(32, 32, 4);
    let skewed = GaussianKernel::new(vec![
        1.0 / 16.0,
        2.0 / 16.0,
        10.0 / 16.0,
        2.0 / 16.0,
        1.0 / 16.0,
    ])
    .unwrap();
    let c = contourlet_decompose_with(&x, &[2, 2], &GaussianKernel::binomial5()).unwrap();
    let wrong = contourlet_reconstruct_with(&c, &skewed).unwrap();
    assert!(max_abs_diff(&x, &wrong) > 1e-3);
    let right = contourlet_reconstruct_with(&c, &GaussianKernel::binomial5()).unwrap();
    assert!(max_abs_diff(&x, &right) <= 1e-6);
}

#[test]
fn serialized_coefficients_survive_a_byte_round_trip() {
    let x = noise(40, 56, 9);
    let c = contourlet_decompose(&x, &[3, 1, 2]).unwrap();
    let back =
        thermolet_core::contourlet::ContourletCoefficients::from_bytes(&c.to_bytes().unwrap())
            .unwrap();
    assert_eq!(back, c);
    let y = contourlet_reconstruct(&back).unwrap();
    assert!(max_abs_diff(&x, &y) <= 1e-6);
}

// Dense reference arithmetic, written without the library's separable
// convolution or border helpers. Whole-sample reflection at the edges.

fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * (n - 1) - i;
        } else {
            return i as usize;
        }
        if n == 1 {
            return 0;
        }
    }
}

fn conv2_reflect(x: &[Vec<f64>], kernel: &[f64]) -> Vec<Vec<f64>> {
    let h = x.len();
    let w = x[0].len();
    let r = kernel.len() as isize / 2;
    let mut out = vec![vec![0.0; w]; h];
    for y in 0..h {
        for xx in 0..w {
            let mut acc = 0.0;
            for (ti, &ty) in kernel.iter().enumerate() {
                for (tj, &tx) in kernel.iter().enumerate() {
                    let sy = reflect(y as isize + ti as isize - r, h);
                    let sx = reflect(xx as isize + tj as isize - r, w);
                    acc += ty * tx * x[sy][sx];
                }
            }
            out[y][xx] = acc;
        }
    }
    out
}

fn decimate(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter().step_by(2).map(|row| row.iter().copied().step_by(2).collect()).collect()
}

fn zero_stuff(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; 2 * x[0].len()]; 2 * x.len()];
    for (y, row) in x.iter().enumerate() {
        for (xx, &v) in row.iter().enumerate() {
            out[2 * y][2 * xx] = v;
        }
    }
    out
}

fn to_rows(x: &ImageTensor) -> Vec<Vec<f64>> {
    (0..x.height()).map(|y| (0..x.width()).map(|xx| x.at(y, xx)).collect()).collect()
}

#[test]
fn pyramid_levels_match_dense_reference_arithmetic() {
    let taps: Vec<f64> = [1.0, 4.0, 6.0, 4.0, 1.0].iter().map(|t| t / 16.0).collect();
    let doubled: Vec<f64> = taps.iter().map(|t| 2.0 * t).collect();
    let x = noise(14, 11, 33);
    let p = lp_decompose(&x, 2, &GaussianKernel::binomial5()).unwrap();

    let mut g = to_rows(&x);
    for level in &p.levels {
        let low = decimate(&conv2_reflect(&g, &taps));
        let mut up = conv2_reflect(&zero_stuff(&low), &doubled);
        up.truncate(g.len());
        for row in &mut up {
            row.truncate(g[0].len());
        }
        for (y, row) in g.iter().enumerate() {
            for (xx, &v) in row.iter().enumerate() {
                let want = v - up[y][xx];
                let got = level.at(y, xx);
                assert!((want - got).abs() <= 1e-10, "({y},{xx}): {want} vs {got}");
            }
        }
        g = low;
    }
    for (y, row) in g.iter().enumerate() {
        for (xx, &v) in row.iter().enumerate() {
            assert!((v - p.base.at(y, xx)).abs() <= 1e-10);
        }
    }
}
