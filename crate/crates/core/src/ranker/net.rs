//! The 8 → 100 → 1 scoring network.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{FeatureVector, FEATURE_DIM};

pub const HIDDEN: usize = 100;

/// W1 (8×100), b1 (100), W2 (100), b2 (1).
pub const PARAM_COUNT: usize = FEATURE_DIM * HIDDEN + HIDDEN + HIDDEN + 1;

pub(crate) const B1: usize = FEATURE_DIM * HIDDEN;
pub(crate) const W2: usize = B1 + HIDDEN;
pub(crate) const B2: usize = W2 + HIDDEN;

/// Network parameters plus the feature standardization learned with them.
///
/// `params` holds W1 row-major by input (`W1[i][j]` at `i * HIDDEN + j`),
/// then b1, W2 and b2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankerWeights {
    pub params: Vec<f64>,
    pub feature_means: FeatureVector,
    pub feature_scales: FeatureVector,
}

impl RankerWeights {
    pub fn zeros() -> Self {
        RankerWeights {
            params: vec![0.0; PARAM_COUNT],
            feature_means: [0.0; FEATURE_DIM],
            feature_scales: [1.0; FEATURE_DIM],
        }
    }

    /// Uniform He initialization (`±sqrt(6 / fan_in)`), zero biases.
    pub fn init(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = Self::zeros();
        let a1 = (6.0 / FEATURE_DIM as f64).sqrt();
        for p in &mut w.params[..B1] {
            *p = rng.random_range(-a1..a1);
        }
        let a2 = (6.0 / HIDDEN as f64).sqrt();
        for p in &mut w.params[W2..B2] {
            *p = rng.random_range(-a2..a2);
        }
        w
    }

    pub fn w1(&self, i: usize, j: usize) -> f64 {
        self.params[i * HIDDEN + j]
    }

    pub fn b1(&self, j: usize) -> f64 {
        self.params[B1 + j]
    }

    pub fn w2(&self, j: usize) -> f64 {
        self.params[W2 + j]
    }

    pub fn b2(&self) -> f64 {
        self.params[B2]
    }

    pub fn standardize(&self, x: &FeatureVector) -> FeatureVector {
        let mut out = [0.0; FEATURE_DIM];
        for i in 0..FEATURE_DIM {
            out[i] = (x[i] - self.feature_means[i]) / self.feature_scales[i];
        }
        out
    }

    /// Hidden pre-activations and score for a standardized input.
    pub(crate) fn forward_std(&self, xs: &FeatureVector, hidden: &mut [f64; HIDDEN]) -> f64 {
        hidden.copy_from_slice(&self.params[B1..W2]);
        for (i, &xi) in xs.iter().enumerate() {
            let row = &self.params[i * HIDDEN..(i + 1) * HIDDEN];
            for (h, &w) in hidden.iter_mut().zip(row) {
                *h += w * xi;
            }
        }
        let mut s = self.b2();
        for (h, &w) in hidden.iter().zip(&self.params[W2..B2]) {
            s += w * h.max(0.0);
        }
        s
    }

    pub fn score(&self, x: &FeatureVector) -> f64 {
        let mut hidden = [0.0; HIDDEN];
        self.forward_std(&self.standardize(x), &mut hidden)
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
            && self.feature_means.iter().all(|p| p.is_finite())
            && self.feature_scales.iter().all(|p| p.is_finite() && *p > 0.0)
    }
}

/// `W2ᵀ relu(W1ᵀ x̂ + b1) + b2` on the standardized features.
pub fn net_forward(w: &RankerWeights, x: &FeatureVector) -> f64 {
    w.score(x)
}

/// Logistic function, evaluated without overflow for either sign.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Probability that `x1` is the better lane.
pub fn pair_probability(w: &RankerWeights, x1: &FeatureVector, x2: &FeatureVector) -> f64 {
    sigmoid(net_forward(w, x1) - net_forward(w, x2))
}

/// Training target derived from two IoU values.
pub fn gt_probability(iou1: f64, iou2: f64, lambda_iou: f64) -> f64 {
    sigmoid(lambda_iou * (iou1 - iou2))
}
