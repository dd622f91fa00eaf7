//! Pairwise training with binary cross-entropy and Adam.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{FeatureVector, FEATURE_DIM};
use super::net::{sigmoid, RankerWeights, B1, B2, HIDDEN, PARAM_COUNT, W2};
use crate::error::{Error, Result};

/// One training pair: target probability that `x1` is the better lane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub x1: FeatureVector,
    pub x2: FeatureVector,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankTrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub lambda_iou: f64,
    pub seed: u64,
}

impl Default for RankTrainConfig {
    fn default() -> Self {
        RankTrainConfig { epochs: 200, batch_size: 8192, learning_rate: 0.008, lambda_iou: 100.0, seed: 0 }
    }
}

impl RankTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 || !(self.learning_rate > 0.0) || !(self.lambda_iou > 0.0) {
            return Err(Error::Config(format!("invalid training config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TrainReport {
    pub weights: RankerWeights,
    /// Mean training loss over the whole dataset after each epoch.
    pub losses: Vec<f64>,
}

/// `softplus(d) - p·d`, the cross-entropy of `sigmoid(d)` against `p`.
fn pair_loss(d: f64, p: f64) -> f64 {
    let softplus = if d > 0.0 { d + (-d).exp().ln_1p() } else { d.exp().ln_1p() };
    softplus - p * d
}

struct Std {
    x1: FeatureVector,
    x2: FeatureVector,
    p: f64,
}

fn standardize_all(w: &RankerWeights, pairs: &[PairSample]) -> Vec<Std> {
    pairs
        .iter()
        .map(|s| Std { x1: w.standardize(&s.x1), x2: w.standardize(&s.x2), p: s.p })
        .collect()
}

/// Adds `coef · ∂score/∂θ` at standardized input `xs` into `grad`.
fn accumulate_score_grad(w: &RankerWeights, xs: &FeatureVector, hidden: &[f64; HIDDEN], coef: f64, grad: &mut [f64]) {
    grad[B2] += coef;
    for j in 0..HIDDEN {
        let z = hidden[j];
        if z > 0.0 {
            grad[W2 + j] += coef * z;
            let g = coef * w.params[W2 + j];
            grad[B1 + j] += g;
            for (i, &xi) in xs.iter().enumerate() {
                grad[i * HIDDEN + j] += g * xi;
            }
        }
    }
}

fn batch_loss_grad(w: &RankerWeights, batch: &[&Std], grad: &mut [f64]) -> f64 {
    grad.iter_mut().for_each(|g| *g = 0.0);
    let inv = 1.0 / batch.len() as f64;
    let mut loss = 0.0;
    let (mut h1, mut h2) = ([0.0; HIDDEN], [0.0; HIDDEN]);
    for s in batch {
        let d = w.forward_std(&s.x1, &mut h1) - w.forward_std(&s.x2, &mut h2);
        loss += pair_loss(d, s.p);
        let dd = (sigmoid(d) - s.p) * inv;
        accumulate_score_grad(w, &s.x1, &h1, dd, grad);
        accumulate_score_grad(w, &s.x2, &h2, -dd, grad);
    }
    loss * inv
}

fn dataset_loss(w: &RankerWeights, data: &[Std]) -> f64 {
    let (mut h1, mut h2) = ([0.0; HIDDEN], [0.0; HIDDEN]);
    let total: f64 = data
        .iter()
        .map(|s| pair_loss(w.forward_std(&s.x1, &mut h1) - w.forward_std(&s.x2, &mut h2), s.p))
        .sum();
    total / data.len() as f64
}

/// Mean pair loss and its analytic gradient with respect to `w.params`,
/// using the standardization stored in `w`.
pub fn loss_and_gradient(w: &RankerWeights, pairs: &[PairSample]) -> (f64, Vec<f64>) {
    let data = standardize_all(w, pairs);
    let refs: Vec<&Std> = data.iter().collect();
    let mut grad = vec![0.0; PARAM_COUNT];
    let loss = batch_loss_grad(w, &refs, &mut grad);
    (loss, grad)
}

/// Fraction of pairs with a definite target (`p ≠ 0.5`) ordered correctly.
pub fn pairwise_accuracy(w: &RankerWeights, pairs: &[PairSample]) -> f64 {
    let mut n = 0usize;
    let mut ok = 0usize;
    for s in pairs.iter().filter(|s| s.p != 0.5) {
        n += 1;
        let d = w.score(&s.x1) - w.score(&s.x2);
        if (d > 0.0) == (s.p > 0.5) {
            ok += 1;
        }
    }
    if n == 0 {
        1.0
    } else {
        ok as f64 / n as f64
    }
}

fn feature_stats(pairs: &[PairSample]) -> (FeatureVector, FeatureVector) {
    let n = 2.0 * pairs.len() as f64;
    let mut mean = [0.0; FEATURE_DIM];
    for s in pairs {
        for i in 0..FEATURE_DIM {
            mean[i] += s.x1[i] + s.x2[i];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = [0.0; FEATURE_DIM];
    for s in pairs {
        for i in 0..FEATURE_DIM {
            var[i] += (s.x1[i] - mean[i]).powi(2) + (s.x2[i] - mean[i]).powi(2);
        }
    }
    let mut scale = [1.0; FEATURE_DIM];
    for i in 0..FEATURE_DIM {
        let sd = (var[i] / n).sqrt();
        if sd > 1e-12 {
            scale[i] = sd;
        }
    }
    (mean, scale)
}

pub fn train(pairs: &[PairSample], cfg: &RankTrainConfig) -> Result<TrainReport> {
    train_with_log(pairs, cfg, |_, _| {})
}

/// Trains from a seeded He initialization; `log(epoch, loss)` is called after every epoch.
pub fn train_with_log(
    pairs: &[PairSample],
    cfg: &RankTrainConfig,
    mut log: impl FnMut(usize, f64),
) -> Result<TrainReport> {
    cfg.validate()?;
    if pairs.is_empty() {
        return Err(Error::Ranker("training set is empty".into()));
    }
    let mut w = RankerWeights::init(cfg.seed);
    let (means, scales) = feature_stats(pairs);
    w.feature_means = means;
    w.feature_scales = scales;
    let data = standardize_all(&w, pairs);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_5eed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut grad = vec![0.0; PARAM_COUNT];
    let mut m = vec![0.0; PARAM_COUNT];
    let mut v = vec![0.0; PARAM_COUNT];
    let (beta1, beta2, eps) = (0.9f64, 0.999f64, 1e-8);
    let mut step = 0i32;
    let mut losses = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&Std> = chunk.iter().map(|&i| &data[i]).collect();
            let loss = batch_loss_grad(&w, &batch, &mut grad);
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch, loss });
            }
            step += 1;
            let c1 = 1.0 - beta1.powi(step);
            let c2 = 1.0 - beta2.powi(step);
            for k in 0..PARAM_COUNT {
                m[k] = beta1 * m[k] + (1.0 - beta1) * grad[k];
                v[k] = beta2 * v[k] + (1.0 - beta2) * grad[k] * grad[k];
                let mh = m[k] / c1;
                let vh = v[k] / c2;
                w.params[k] -= cfg.learning_rate * mh / (vh.sqrt() + eps);
            }
        }
        let loss = dataset_loss(&w, &data);
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch, loss });
        }
        log(epoch, loss);
        losses.push(loss);
    }
    Ok(TrainReport { weights: w, losses })
}
