//! Numerical core for infrared image super-resolution analysis: contourlet
//! decomposition and reconstruction, a frequency-domain fidelity loss with
//! analytic gradient, degradation-prompt loss algebra, reference attention
//! forward passes, and the usual fidelity metrics.
//!
//! Everything is plain f64 on dense row-major grids, deterministic, and
//! pure: no global state, no threads, no hidden caches.

pub mod attention;
pub mod contourlet;
pub mod conv;
pub mod error;
pub mod metrics;
pub mod pgm;
pub mod prompt;
pub mod resample;
pub mod spectral;
pub mod tensor;
mod util;

pub use error::{Error, Result};
pub use tensor::{extend_border, BorderPolicy, ImageTensor};
pub use util::sig17;
