//! Prompt-similarity loss algebra over an abstract embedding provider.
//!
//! Everything downstream of the encoders is pure arithmetic: similarity is
//! e^cos, classification is the two-prompt ratio, and the degradation loss
//! is a batch mean of negative-to-positive similarity ratios. Encoders
//! themselves are behind [`EmbeddingProvider`]; [`StubEmbedder`] is a
//! deterministic hash-to-sphere stand-in so the algebra is testable without
//! model weights.
//!
//! Training alternates between two separately callable objectives rather
//! than a built-in optimizer: a prompt-refinement step scores images with
//! [`classify_prob`] and minimizes [`bce_prompt_loss`] to sharpen the pair,
//! then a restoration step holds the prompts fixed and minimizes
//! [`total_loss`], whose [`degradation_loss`] term pushes outputs toward the
//! positive prompt. Both are plain evaluations; scheduling them is the
//! caller's job.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::mse;
use crate::spectral::spectral_fidelity_loss;
use crate::tensor::ImageTensor;

/// Image and text encoders producing unit-norm embeddings of a fixed
/// dimension. Implementations must be deterministic: identical input,
/// bit-identical vector.
pub trait EmbeddingProvider {
    fn image_embed(&self, x: &ImageTensor) -> Result<Vec<f64>>;
    fn text_embed(&self, text: &str) -> Result<Vec<f64>>;
    fn dim(&self) -> usize;
}

/// Embedded positive ("sharp", reference-like) and negative (degraded)
/// prompts. Construction enforces unit norm and distinctness.
#[derive(Clone, Debug, PartialEq)]
pub struct PromptPair {
    positive: Vec<f64>,
    negative: Vec<f64>,
}

fn check_unit(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} embedding is empty")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("{what} embedding")));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("{what} embedding has norm {norm}, not 1")));
    }
    Ok(())
}

impl PromptPair {
    pub fn new(positive: Vec<f64>, negative: Vec<f64>) -> Result<Self> {
        check_unit(&positive, "positive")?;
        check_unit(&negative, "negative")?;
        if positive.len() != negative.len() {
            return Err(Error::Shape(format!(
                "prompt dims differ: {} vs {}",
                positive.len(),
                negative.len()
            )));
        }
        if positive == negative {
            return Err(Error::InvalidArgument("prompts must be distinct vectors".into()));
        }
        Ok(PromptPair { positive, negative })
    }

    pub fn positive(&self) -> &[f64] {
        &self.positive
    }

    pub fn negative(&self) -> &[f64] {
        &self.negative
    }

    /// Same prompts with the roles exchanged.
    pub fn swapped(&self) -> Self {
        PromptPair { positive: self.negative.clone(), negative: self.positive.clone() }
    }
}

/// e raised to the cosine similarity; [e^-1, e] on unit vectors.
pub fn sim(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Shape(format!("embedding dims {} vs {}", a.len(), b.len())));
    }
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateSize("zero vector has no direction".into()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).exp())
}

/// Probability that the image matches the positive prompt:
/// SIM(I, T_pos) / (SIM(I, T_neg) + SIM(I, T_pos)).
///
/// The two-sided ratio is computed once from the smaller similarity and
/// complemented, so swapping the prompt roles maps the result to exactly
/// 1 - y, bitwise, and the two readings sum to exactly 1.
pub fn classify_prob(image_emb: &[f64], prompts: &PromptPair) -> Result<f64> {
    let s_pos = sim(image_emb, &prompts.positive)?;
    let s_neg = sim(image_emb, &prompts.negative)?;
    let total = s_pos + s_neg;
    let low = s_pos.min(s_neg) / total;
    let high = 1.0 - low;
    let low = 1.0 - high; // re-derive so low + high is exactly 1
    Ok(if s_pos <= s_neg { low } else { high })
}

/// Binary cross-entropy against a hard label, with the prediction clamped
/// to [1e-7, 1 - 1e-7] before the logs.
pub fn bce_prompt_loss(y_hat: f64, label: f64) -> Result<f64> {
    if label != 0.0 && label != 1.0 {
        return Err(Error::InvalidArgument(format!("label must be 0 or 1, got {label}")));
    }
    if !(0.0..=1.0).contains(&y_hat) {
        return Err(Error::InvalidArgument(format!("prediction {y_hat} outside [0, 1]")));
    }
    let p = y_hat.clamp(1e-7, 1.0 - 1e-7);
    Ok(-(label * p.ln() + (1.0 - label) * (1.0 - p).ln()))
}

/// Batch mean of SIM(I, T_neg) / SIM(I, T_pos): small when images look like
/// the positive prompt, always positive.
pub fn degradation_loss(
    images: &[ImageTensor],
    prompts: &PromptPair,
    provider: &dyn EmbeddingProvider,
) -> Result<f64> {
    if images.is_empty() {
        return Err(Error::InvalidArgument("degradation loss needs at least one image".into()));
    }
    let mut acc = 0.0;
    for img in images {
        let emb = provider.image_embed(img)?;
        acc += sim(&emb, &prompts.negative)? / sim(&emb, &prompts.positive)?;
    }
    Ok(acc / images.len() as f64)
}

/// Optional hook for a perceptual term: any map from image to feature
/// vector. Without one, the perceptual term is zero.
pub trait FeatureExtractor {
    fn features(&self, x: &ImageTensor) -> Result<Vec<f64>>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossWeights {
    pub spectral: f64,
    pub degradation: f64,
    pub pixel: f64,
    pub perceptual: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights { spectral: 1.0, degradation: 1.0, pixel: 1.0, perceptual: 1.0 }
    }
}

/// Raw per-term values plus the weighted total. The terms are reported
/// before weighting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossBreakdown {
    pub spectral: f64,
    pub degradation: f64,
    pub pixel: f64,
    pub perceptual: f64,
    pub total: f64,
}

pub fn total_loss(
    hr: &ImageTensor,
    sr: &ImageTensor,
    prompts: &PromptPair,
    provider: &dyn EmbeddingProvider,
    weights: LossWeights,
) -> Result<LossBreakdown> {
    total_loss_with(hr, sr, prompts, provider, weights, None)
}

pub fn total_loss_with(
    hr: &ImageTensor,
    sr: &ImageTensor,
    prompts: &PromptPair,
    provider: &dyn EmbeddingProvider,
    weights: LossWeights,
    extractor: Option<&dyn FeatureExtractor>,
) -> Result<LossBreakdown> {
    let spectral = spectral_fidelity_loss(hr, sr)?;
    let pixel = mse(hr, sr)?;
    let degradation = degradation_loss(std::slice::from_ref(sr), prompts, provider)?;
    let perceptual = match extractor {
        Some(e) => {
            let fh = e.features(hr)?;
            let fs = e.features(sr)?;
            if fh.len() != fs.len() || fh.is_empty() {
                return Err(Error::Shape(format!(
                    "feature dims {} vs {}",
                    fh.len(),
                    fs.len()
                )));
            }
            fh.iter().zip(&fs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / fh.len() as f64
        }
        None => 0.0,
    };
    let total = weights.spectral * spectral
        + weights.degradation * degradation
        + weights.pixel * pixel
        + weights.perceptual * perceptual;
    Ok(LossBreakdown { spectral, degradation, pixel, perceptual, total })
}

/// Deterministic stand-in encoder: image statistics (or prompt bytes) hash
/// to an RNG seed, the RNG draws a gaussian vector, and the vector is
/// normalized onto the sphere. No semantics, full determinism.
#[derive(Clone, Debug)]
pub struct StubEmbedder {
    seed: u64,
    dim: usize,
}

impl StubEmbedder {
    pub fn new(seed: u64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be positive".into()));
        }
        Ok(StubEmbedder { seed, dim })
    }

    fn fnv(&self, domain: u64, words: impl Iterator<Item = u64>) -> u64 {
        let mut h = 0xcbf29ce484222325u64
            ^ self.seed.wrapping_mul(0x9e3779b97f4a7c15)
            ^ domain;
        for word in words {
            for b in word.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }

    fn sphere_point(&self, hash: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(hash);
        let mut v = Vec::with_capacity(self.dim + 1);
        while v.len() < self.dim {
            // Box-Muller; 1 - u keeps the log argument in (0, 1]
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random::<f64>();
            let r = (-2.0 * u1.ln()).sqrt();
            let th = std::f64::consts::TAU * u2;
            v.push(r * th.cos());
            v.push(r * th.sin());
        }
        v.truncate(self.dim);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            // astronomically unlikely all-zero draw; pin to an axis
            v[0] = 1.0;
            return v;
        }
        for x in &mut v {
            *x /= norm;
        }
        v
    }

    /// Summary statistics that feed the image hash: dimensions, moments,
    /// extrema, and quadrant means, in a fixed order.
    fn image_stats(x: &ImageTensor) -> Vec<f64> {
        let (h, w, c) = x.dims();
        let n = x.len() as f64;
        let data = x.as_slice();
        let mean = data.iter().sum::<f64>() / n;
        let m2 = data.iter().map(|v| v * v).sum::<f64>() / n;
        let min = data.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut quad_sum = [0.0; 4];
        let mut quad_n = [0u64; 4];
        for y in 0..h {
            for xx in 0..w {
                let q = 2 * usize::from(y >= h.div_ceil(2)) + usize::from(xx >= w.div_ceil(2));
                for ch in 0..c {
                    quad_sum[q] += x.get(y, xx, ch);
                    quad_n[q] += 1;
                }
            }
        }
        let mut stats = vec![h as f64, w as f64, c as f64, mean, m2, min, max];
        for q in 0..4 {
            stats.push(if quad_n[q] == 0 { 0.0 } else { quad_sum[q] / quad_n[q] as f64 });
        }
        stats
    }
}

impl EmbeddingProvider for StubEmbedder {
    fn image_embed(&self, x: &ImageTensor) -> Result<Vec<f64>> {
        let stats = Self::image_stats(x);
        let hash = self.fnv(0x696d616765, stats.iter().map(|v| v.to_bits()));
        Ok(self.sphere_point(hash))
    }

    fn text_embed(&self, text: &str) -> Result<Vec<f64>> {
        let hash = self.fnv(0x74657874, text.bytes().map(u64::from));
        Ok(self.sphere_point(hash))
    }

    fn dim(&self) -> usize {
        self.dim
    }
}
