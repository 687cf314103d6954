//! Built-in numerical checks: reconstruction identities, a direct-sum DFT
//! oracle, Parseval, a finite-difference gradient probe, and metric sanity.
//! Everything is generated from the seed, so repeated runs print identical
//! numbers.
//!
//! The hidden `--corrupt-kernel` flag swaps the synthesis kernel for a
//! deliberately wrong one; the reconstruction checks must then fail. It
//! exists as a negative control for the harness itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermolet_core::contourlet::{
    contourlet_decompose_with, contourlet_reconstruct_with, lp_decompose, lp_reconstruct,
    GaussianKernel,
};
use thermolet_core::metrics::{mse, psnr, ssim};
use thermolet_core::sig17;
use thermolet_core::spectral::{dft2, spectral_fidelity_loss, spectral_fidelity_grad, Complex64};
use thermolet_core::ImageTensor;

struct Check {
    name: &'static str,
    measured: f64,
    tolerance: f64,
}

fn noise(rng: &mut ChaCha8Rng, h: usize, w: usize, lo: f64, hi: f64) -> ImageTensor {
    let data = (0..h * w).map(|_| lo + rng.random::<f64>() * (hi - lo)).collect();
    ImageTensor::new(h, w, 1, data).expect("generated image is well formed")
}

fn max_abs_diff(a: &ImageTensor, b: &ImageTensor) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn run(seed: u64, corrupt_kernel: bool) -> bool {
    let analysis = GaussianKernel::binomial5();
    let synthesis = if corrupt_kernel {
        let taps = [1.0, 2.0, 10.0, 2.0, 1.0].iter().map(|t| t / 16.0).collect();
        GaussianKernel::new(taps).expect("control kernel is well formed")
    } else {
        GaussianKernel::binomial5()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // pyramid and full-transform round trips
    {
        let x = noise(&mut rng, 64, 64, -1.0, 1.0);
        let p = lp_decompose(&x, 4, &analysis).expect("64x64 supports 4 levels");
        let back = lp_reconstruct(&p, &synthesis).expect("pyramid is structurally valid");
        checks.push(Check {
            name: "lp-round-trip",
            measured: max_abs_diff(&x, &back),
            tolerance: 1e-9,
        });

        let c = contourlet_decompose_with(&x, &[2, 3, 3], &analysis)
            .expect("64x64 supports 3 levels");
        let back = contourlet_reconstruct_with(&c, &synthesis)
            .expect("coefficients are structurally valid");
        checks.push(Check {
            name: "contourlet-round-trip",
            measured: max_abs_diff(&x, &back),
            tolerance: 1e-6,
        });
    }

    // fast transform against the direct double sum
    {
        let x = noise(&mut rng, 8, 8, -2.0, 2.0);
        let fast = dft2(&x).expect("single channel input");
        let mut worst = 0.0f64;
        for u in 0..8 {
            for v in 0..8 {
                let mut acc = Complex64::new(0.0, 0.0);
                for sy in 0..8 {
                    for sx in 0..8 {
                        let phase = -2.0
                            * std::f64::consts::PI
                            * ((u * sy) as f64 / 8.0 + (v * sx) as f64 / 8.0);
                        acc += Complex64::new(phase.cos(), phase.sin()) * x.at(sy, sx);
                    }
                }
                worst = worst.max((fast.at(u, v) - acc).norm());
            }
        }
        checks.push(Check { name: "dft-oracle", measured: worst, tolerance: 1e-9 });
    }

    // energy identity between the two domains
    {
        let x = noise(&mut rng, 16, 16, -2.0, 2.0);
        let spatial: f64 = x.as_slice().iter().map(|v| v * v).sum();
        let f = dft2(&x).expect("single channel input");
        let freq = f.bins().iter().map(|c| c.norm_sqr()).sum::<f64>() / 256.0;
        checks.push(Check {
            name: "parseval",
            measured: (spatial - freq).abs() / spatial,
            tolerance: 1e-6,
        });
    }

    // analytic gradient against central differences
    {
        let hr = noise(&mut rng, 8, 8, 0.0, 255.0);
        let sr = noise(&mut rng, 8, 8, 0.0, 255.0);
        let grad = spectral_fidelity_grad(&hr, &sr).expect("matched dims");
        let step = 1e-5;
        let mut worst = 0.0f64;
        for y in 0..8 {
            for x in 0..8 {
                let mut plus = sr.clone();
                plus.set(y, x, 0, sr.at(y, x) + step);
                let mut minus = sr.clone();
                minus.set(y, x, 0, sr.at(y, x) - step);
                let fd = (spectral_fidelity_loss(&hr, &plus).expect("matched dims")
                    - spectral_fidelity_loss(&hr, &minus).expect("matched dims"))
                    / (2.0 * step);
                let g = grad.at(y, x);
                worst = worst.max((g - fd).abs() / g.abs().max(fd.abs()).max(1e-8));
            }
        }
        checks.push(Check { name: "gradient-check", measured: worst, tolerance: 1e-4 });
    }

    // metric sanity: closed-form psnr, self-ssim, and the mse definition
    {
        let x = noise(&mut rng, 64, 64, 0.0, 239.0);
        let shifted = ImageTensor::from_fn(64, 64, 1, |y, xx, _| x.at(y, xx) + 16.0)
            .expect("shifted copy is well formed");
        let p = psnr(&x, &shifted, 255.0).expect("matched dims");
        checks.push(Check {
            name: "psnr-uniform-16",
            measured: (p - 24.0486).abs(),
            tolerance: 1e-3,
        });
        checks.push(Check {
            name: "ssim-self",
            measured: (ssim(&x, &x).expect("matched dims") - 1.0).abs(),
            tolerance: 1e-12,
        });
        let y = noise(&mut rng, 64, 64, 0.0, 255.0);
        let naive = x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / 4096.0;
        checks.push(Check {
            name: "mse-oracle",
            measured: (mse(&x, &y).expect("matched dims") - naive).abs(),
            tolerance: 1e-12,
        });
    }

    let mut all_pass = true;
    for c in &checks {
        let pass = c.measured <= c.tolerance;
        all_pass &= pass;
        println!(
            "check {} measured {} tolerance {} {}",
            c.name,
            sig17(c.measured),
            sig17(c.tolerance),
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("selfcheck {}", if all_pass { "PASS" } else { "FAIL" });
    all_pass
}
