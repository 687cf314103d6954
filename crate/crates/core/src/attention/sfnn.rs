//! Gated feed-forward with a depthwise spatial mix on the gate branch.

use super::linalg::{gelu, Mat};
use super::{from_tokens, to_tokens, FeatureMap};
use crate::conv::depthwise3x3;
use crate::error::{Error, Result};
use crate::tensor::BorderPolicy;

/// Expansion maps c input channels onto 2*hidden, the two halves gate each
/// other (the second after a per-channel 3x3), and `w2` projects back.
#[derive(Clone, Debug, PartialEq)]
pub struct SfnnParams {
    pub hidden: usize,
    /// c x 2*hidden, row-major, applied from the right.
    pub w1: Vec<f64>,
    /// hidden x c, row-major.
    pub w2: Vec<f64>,
    /// hidden x 3 x 3 depthwise taps for the gate branch.
    pub depthwise: Vec<f64>,
}

impl SfnnParams {
    fn check(&self, channels: usize) -> Result<()> {
        if self.hidden == 0 {
            return Err(Error::InvalidArgument("hidden width must be positive".into()));
        }
        let lens = [
            ("w1", self.w1.len(), channels * 2 * self.hidden),
            ("w2", self.w2.len(), self.hidden * channels),
            ("depthwise", self.depthwise.len(), self.hidden * 9),
        ];
        for (name, got, want) in lens {
            if got != want {
                return Err(Error::Shape(format!("{name} has {got} entries, needs {want}")));
            }
        }
        if self.w1.iter().chain(&self.w2).chain(&self.depthwise).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feed-forward weights".into()));
        }
        Ok(())
    }
}

pub fn sfnn_forward(x: &FeatureMap, params: &SfnnParams) -> Result<FeatureMap> {
    let (h, w, c) = x.dims();
    params.check(c)?;
    let t = to_tokens(x);
    let w1 = Mat::from_vec(c, 2 * params.hidden, params.w1.clone());
    let mut expanded = t.matmul(&w1);
    for v in &mut expanded.data {
        *v = gelu(*v);
    }
    let direct = expanded.col_slice(0, params.hidden);
    let gate = expanded.col_slice(params.hidden, 2 * params.hidden);

    // the gate branch sees its 3x3 neighborhood before the product
    let gate_map = from_tokens(&gate, h, w)?;
    let mixed = depthwise3x3(&gate_map, &params.depthwise, BorderPolicy::Symmetric)?;
    let mixed = to_tokens(&mixed);

    let mut gated = Mat::zeros(t.rows, params.hidden);
    for i in 0..gated.data.len() {
        gated.data[i] = direct.data[i] * mixed.data[i];
    }
    let w2 = Mat::from_vec(params.hidden, c, params.w2.clone());
    from_tokens(&gated.matmul(&w2), h, w)
}
