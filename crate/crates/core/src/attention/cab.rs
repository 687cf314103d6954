//! Channel attention: logits live in channel space, so the map mixes
//! feature planes globally instead of pixels locally.

use super::linalg::{softmax_rows_in_place, Mat};
use super::{from_tokens, to_tokens, AttentionParams, FeatureMap};
use crate::error::Result;

/// Per head, attention weights are softmax((Q^T K) / alpha) over head
/// channels, and the output re-mixes V's channels with those weights. The
/// whole image is one token set; `params.window` is ignored.
pub fn cab_forward(x: &FeatureMap, params: &AttentionParams) -> Result<FeatureMap> {
    let (h, w, c) = x.dims();
    params.check(c)?;
    let t = to_tokens(x);
    let wq = Mat::from_vec(c, c, params.wq.clone());
    let wk = Mat::from_vec(c, c, params.wk.clone());
    let wv = Mat::from_vec(c, c, params.wv.clone());
    let wo = Mat::from_vec(c, c, params.wo.clone());

    let q = t.matmul(&wq);
    let k = t.matmul(&wk);
    let v = t.matmul(&wv);
    let dh = c / params.heads;
    let mut o = Mat::zeros(t.rows, c);
    for head in 0..params.heads {
        let (lo, hi) = (head * dh, (head + 1) * dh);
        let mut a = q.col_slice(lo, hi).transpose().matmul(&k.col_slice(lo, hi));
        a.scale(1.0 / params.alpha);
        softmax_rows_in_place(&mut a);
        o.set_cols(lo, &v.col_slice(lo, hi).matmul(&a.transpose()));
    }
    from_tokens(&o.matmul(&wo), h, w)
}
