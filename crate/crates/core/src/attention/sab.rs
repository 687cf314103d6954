//! Window-local multi-head self-attention over pixel tokens.

use super::{from_tokens, msa, to_tokens, window_merge, window_partition};
use super::{AttentionParams, FeatureMap, Projections};
use crate::error::Result;

/// Attention runs independently inside each window x window tile; pixels in
/// different tiles never exchange information here.
pub fn sab_forward(x: &FeatureMap, params: &AttentionParams) -> Result<FeatureMap> {
    let (h, w, c) = x.dims();
    params.check(c)?;
    let tiles = window_partition(x, params.window)?;
    let proj = Projections::new(params, c);
    let mut out = Vec::with_capacity(tiles.len());
    for tile in &tiles {
        let attended = msa(&to_tokens(tile), &proj);
        out.push(from_tokens(&attended, params.window, params.window)?);
    }
    window_merge(&out, h, w, params.window)
}
