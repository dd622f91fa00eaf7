//! Training pairs for the ranker, harvested from simulated detections.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::lane_iou;
use super::mix_seed;
use super::sim::{simulate_partial_map, SimConfig};
use super::track::TrackRecord;
use crate::error::{Error, Result};
use crate::graph::{construct_search_graph, find_starting_vertices_widening, DetectionConfig};
use crate::ranker::{extract_features, gt_probability, FeatureVector, PairSample};
use crate::search::{epp, try_close};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub ranges: Vec<f64>,
    pub fp_rates: Vec<f64>,
    pub noise_sigma: f64,
    pub seeds: u32,
    pub global_seed: u64,
    /// Candidates sampled per instance; all pairs among them are emitted.
    pub candidates_per_instance: usize,
    pub lambda_iou: f64,
    pub detection: DetectionConfig,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            ranges: vec![30.0, 50.0],
            fp_rates: vec![0.0, 0.1, 0.3, 0.5],
            noise_sigma: 0.25,
            seeds: 1,
            global_seed: 0,
            candidates_per_instance: 8,
            lambda_iou: 100.0,
            detection: DetectionConfig::default(),
        }
    }
}

/// Features of sampled candidates plus their IoU against the visible GT.
type Scored = Vec<(FeatureVector, f64)>;

fn harvest(tracks: &[TrackRecord], cfg: &DatasetConfig, with_iou: bool) -> Result<Vec<Scored>> {
    if tracks.is_empty() || cfg.candidates_per_instance < 2 {
        return Err(Error::Config("need tracks and at least two candidates per instance".into()));
    }
    cfg.detection.validate()?;
    let mut out = Vec::new();
    for (ti, t) in tracks.iter().enumerate() {
        for &range in &cfg.ranges {
            for &fp_rate in &cfg.fp_rates {
                for k in 0..cfg.seeds {
                    let seed = mix_seed(&[cfg.global_seed, ti as u64, range.to_bits(), fp_rate.to_bits(), k as u64]);
                    let sim = SimConfig { perception_range: range, fp_rate, noise_sigma: cfg.noise_sigma, rng_seed: seed };
                    sim.validate()?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xda7a);
                    for pose in 0..t.poses.len() {
                        let s = simulate_partial_map(t, pose, &sim)?;
                        if !s.gt.is_usable() {
                            continue;
                        }
                        let Ok(start) = find_starting_vertices_widening(&s.map, &s.pose, cfg.detection.start_radius) else {
                            continue;
                        };
                        let graph = construct_search_graph(&s.map, cfg.detection.d_max);
                        let mut cands = epp(&graph, start, s.pose.heading, &cfg.detection, None).candidates;
                        let closed: Vec<_> = cands.iter().filter_map(|c| try_close(c, &graph, &cfg.detection)).collect();
                        cands.extend(closed);
                        let picked: Vec<_> = cands.choose_multiple(&mut rng, cfg.candidates_per_instance).collect();
                        if picked.len() < 2 {
                            continue;
                        }
                        let pts = s.map.points();
                        let (gl, gr) = s.gt.points(pts);
                        out.push(
                            picked
                                .into_iter()
                                .map(|c| {
                                    let iou = if with_iou {
                                        let (l, r) = c.boundaries(pts);
                                        lane_iou((&l, &r), (&gl, &gr))
                                    } else {
                                        0.0
                                    };
                                    (extract_features(c, pts), iou)
                                })
                                .collect(),
                        );
                    }
                }
            }
        }
    }
    Ok(out)
}

fn all_pairs(groups: &[Scored], target: impl Fn(&(FeatureVector, f64), &(FeatureVector, f64)) -> Option<f64>) -> Vec<PairSample> {
    let mut pairs = Vec::new();
    for g in groups {
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                if let Some(p) = target(&g[i], &g[j]) {
                    pairs.push(PairSample { x1: g[i].0, x2: g[j].0, p });
                }
            }
        }
    }
    pairs
}

/// Pairs labelled by `sigmoid(λ · (IoU₁ − IoU₂))` against the visible GT.
pub fn ranking_pairs(tracks: &[TrackRecord], cfg: &DatasetConfig) -> Result<Vec<PairSample>> {
    let groups = harvest(tracks, cfg, true)?;
    Ok(all_pairs(&groups, |a, b| Some(gt_probability(a.1, b.1, cfg.lambda_iou))))
}

/// Pairs whose target is 1 when the first lane is longer and 0 when it is
/// shorter; equal lengths are dropped. The first feature is the lane length,
/// so the set is separable.
pub fn length_ordered_pairs(tracks: &[TrackRecord], cfg: &DatasetConfig) -> Result<Vec<PairSample>> {
    let groups = harvest(tracks, cfg, false)?;
    Ok(all_pairs(&groups, |a, b| {
        let d = a.0[0] - b.0[0];
        if d.abs() < 1e-6 {
            None
        } else {
            Some(if d > 0.0 { 1.0 } else { 0.0 })
        }
    }))
}
