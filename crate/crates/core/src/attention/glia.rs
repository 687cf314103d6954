//! Global-local interaction through learned per-window tokens.
//!
//! Each window contributes a few summary tokens (pooled from a 3x3 conv of
//! the input). Tokens from all windows attend to each other globally, then
//! each window runs joint attention over its own pixels plus its updated
//! tokens. The output adds every token back onto the pixel positions it was
//! pooled from, so information flows window -> global -> window without a
//! full-image attention matrix.

use super::linalg::{layer_norm_rows, Mat};
use super::{from_tokens, msa, to_tokens, window_merge, window_partition};
use super::{AttentionParams, FeatureMap, Projections};
use crate::conv::conv3x3;
use crate::error::{Error, Result};
use crate::tensor::BorderPolicy;

/// Two-layer feed-forward: gelu(x w1 + b1) w2 + b2.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpParams {
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl MlpParams {
    pub fn zeros(channels: usize, hidden: usize) -> Self {
        MlpParams {
            hidden,
            w1: vec![0.0; channels * hidden],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden * channels],
            b2: vec![0.0; channels],
        }
    }

    fn check(&self, channels: usize) -> Result<()> {
        if self.hidden == 0 {
            return Err(Error::InvalidArgument("mlp hidden width must be positive".into()));
        }
        let lens = [
            ("w1", self.w1.len(), channels * self.hidden),
            ("b1", self.b1.len(), self.hidden),
            ("w2", self.w2.len(), self.hidden * channels),
            ("b2", self.b2.len(), channels),
        ];
        for (name, got, want) in lens {
            if got != want {
                return Err(Error::Shape(format!("mlp {name} has {got} entries, needs {want}")));
            }
        }
        let all = self.w1.iter().chain(&self.b1).chain(&self.w2).chain(&self.b2);
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("mlp weights".into()));
        }
        Ok(())
    }

    fn apply(&self, x: &Mat) -> Mat {
        let w1 = Mat::from_vec(x.cols, self.hidden, self.w1.clone());
        let mut h = x.matmul(&w1);
        for r in 0..h.rows {
            for c in 0..h.cols {
                let v = super::linalg::gelu(h.at(r, c) + self.b1[c]);
                h.set(r, c, v);
            }
        }
        let w2 = Mat::from_vec(self.hidden, x.cols, self.w2.clone());
        let mut out = h.matmul(&w2);
        for r in 0..out.rows {
            for c in 0..out.cols {
                out.set(r, c, out.at(r, c) + self.b2[c]);
            }
        }
        out
    }
}

/// Configuration of the token block. Residual branches are scaled by the
/// gammas, so zero gammas disable the corresponding update entirely.
#[derive(Clone, Debug, PartialEq)]
pub struct GliaParams {
    pub window: usize,
    /// Tokens pooled per window; must divide window*window.
    pub tokens_per_window: usize,
    /// c x c x 3 x 3 conv producing the pooling source, flattened
    /// [oc][ic][ky][kx].
    pub token_conv: Vec<f64>,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub token_msa: AttentionParams,
    pub token_mlp: MlpParams,
    pub joint_msa: AttentionParams,
    pub joint_mlp: MlpParams,
}

impl GliaParams {
    /// Parameters that make the block a bitwise no-op: zero conv (so every
    /// token is zero), zero gammas (so no residual fires).
    pub fn inert(window: usize, tokens_per_window: usize, channels: usize) -> Self {
        GliaParams {
            window,
            tokens_per_window,
            token_conv: vec![0.0; channels * channels * 9],
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            gamma4: 0.0,
            token_msa: AttentionParams::identity(1, window, channels),
            token_mlp: MlpParams::zeros(channels, channels),
            joint_msa: AttentionParams::identity(1, window, channels),
            joint_mlp: MlpParams::zeros(channels, channels),
        }
    }

    fn check(&self, channels: usize) -> Result<()> {
        if self.window == 0 {
            return Err(Error::InvalidArgument("window must be positive".into()));
        }
        let k2 = self.window * self.window;
        if self.tokens_per_window == 0 || k2 % self.tokens_per_window != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} tokens cannot evenly chunk {k2} window positions",
                self.tokens_per_window
            )));
        }
        if self.token_conv.len() != channels * channels * 9 {
            return Err(Error::Shape(format!(
                "token conv has {} weights, needs {channels}x{channels}x3x3",
                self.token_conv.len()
            )));
        }
        let gammas = [self.gamma1, self.gamma2, self.gamma3, self.gamma4];
        if gammas.iter().any(|g| !g.is_finite())
            || self.token_conv.iter().any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("token block parameters".into()));
        }
        self.token_msa.check(channels)?;
        self.joint_msa.check(channels)?;
        self.token_mlp.check(channels)?;
        self.joint_mlp.check(channels)
    }
}

fn add_scaled(target: &mut Mat, delta: &Mat, scale: f64) {
    debug_assert_eq!(target.data.len(), delta.data.len());
    for (t, d) in target.data.iter_mut().zip(&delta.data) {
        *t += scale * d;
    }
}

pub fn glia_forward(x: &FeatureMap, params: &GliaParams) -> Result<FeatureMap> {
    let (h, w, c) = x.dims();
    params.check(c)?;
    let window = params.window;
    if h % window != 0 || w % window != 0 {
        return Err(Error::Shape(format!("{h}x{w} is not tileable by {window}x{window} windows")));
    }
    let k2 = window * window;
    let l = params.tokens_per_window;
    let group = k2 / l;

    // pool tokens from a conv of the input: consecutive row-major chunks of
    // each window average into one token
    let source = conv3x3(x, &params.token_conv, c, BorderPolicy::Symmetric)?;
    let source_tiles = window_partition(&source, window)?;
    let nw = source_tiles.len();
    let mut tokens = Mat::zeros(nw * l, c);
    for (wi, tile) in source_tiles.iter().enumerate() {
        let tmat = to_tokens(tile);
        for g in 0..l {
            for ch in 0..c {
                let mut acc = 0.0;
                for j in 0..group {
                    acc += tmat.at(g * group + j, ch);
                }
                tokens.set(wi * l + g, ch, acc / group as f64);
            }
        }
    }

    // global stage: every token attends to every other token
    let tproj = Projections::new(&params.token_msa, c);
    let attended = msa(&layer_norm_rows(&tokens), &tproj);
    add_scaled(&mut tokens, &attended, params.gamma1);
    let fed = params.token_mlp.apply(&layer_norm_rows(&tokens));
    add_scaled(&mut tokens, &fed, params.gamma2);

    // joint stage: window pixels and their own tokens attend together
    let jproj = Projections::new(&params.joint_msa, c);
    let pixel_tiles = window_partition(x, window)?;
    let mut out_tiles = Vec::with_capacity(nw);
    let mut final_tokens = Mat::zeros(nw * l, c);
    for (wi, tile) in pixel_tiles.iter().enumerate() {
        let tmat = to_tokens(tile);
        let mut joint = Mat::zeros(k2 + l, c);
        for r in 0..k2 {
            for ch in 0..c {
                joint.set(r, ch, tmat.at(r, ch));
            }
        }
        for g in 0..l {
            for ch in 0..c {
                joint.set(k2 + g, ch, tokens.at(wi * l + g, ch));
            }
        }
        let attended = msa(&layer_norm_rows(&joint), &jproj);
        add_scaled(&mut joint, &attended, params.gamma3);
        let fed = params.joint_mlp.apply(&layer_norm_rows(&joint));
        add_scaled(&mut joint, &fed, params.gamma4);

        let mut pixels = Mat::zeros(k2, c);
        for r in 0..k2 {
            for ch in 0..c {
                pixels.set(r, ch, joint.at(r, ch));
            }
        }
        out_tiles.push(from_tokens(&pixels, window, window)?);
        for g in 0..l {
            for ch in 0..c {
                final_tokens.set(wi * l + g, ch, joint.at(k2 + g, ch));
            }
        }
    }

    // every pixel position receives its chunk's token back
    let merged = window_merge(&out_tiles, h, w, window)?;
    let gx = w / window;
    FeatureMap::from_fn(h, w, c, |y, xx, ch| {
        let wi = (y / window) * gx + xx / window;
        let pos = (y % window) * window + xx % window;
        merged.get(y, xx, ch) + final_tokens.at(wi * l + pos / group, ch)
    })
}
