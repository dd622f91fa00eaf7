//! Batch evaluation over tracks, poses and simulation settings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{classify_prediction, first_iteration_reaching, lane_length, Category, LaneRegion};
use super::mix_seed;
use super::sim::{simulate_partial_map, SimConfig};
use super::track::TrackRecord;
use crate::error::{Error, Result};
use crate::graph::DetectionConfig;
use crate::ranker::RankerWeights;
use crate::search::{clc, Seed};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub ranges: Vec<f64>,
    pub fp_rates: Vec<f64>,
    pub noise_sigma: f64,
    /// Runs per (track, range, fp rate) combination.
    pub seeds: u32,
    pub global_seed: u64,
    pub warmstart: bool,
    /// Write measured wall time; off keeps the CSV reproducible.
    pub record_timing: bool,
    /// Also find the first iteration reaching this IoU against the visible GT.
    pub hit_iou: Option<f64>,
    pub detection: DetectionConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            ranges: vec![30.0, 50.0],
            fp_rates: vec![0.0, 0.1, 0.3, 0.5],
            noise_sigma: 0.0,
            seeds: 5,
            global_seed: 0,
            warmstart: true,
            record_timing: false,
            hit_iou: None,
            detection: DetectionConfig::default(),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ranges.is_empty() || self.fp_rates.is_empty() || self.seeds == 0 {
            return Err(Error::Config("evaluation needs at least one range, fp rate and seed".into()));
        }
        for &range in &self.ranges {
            for &fp_rate in &self.fp_rates {
                SimConfig { perception_range: range, fp_rate, noise_sigma: self.noise_sigma, rng_seed: 0 }.validate()?;
            }
        }
        self.detection.validate()
    }
}

/// One detection on one simulated partial map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceResult {
    pub track: String,
    pub pose_idx: usize,
    pub range: f64,
    pub fp_rate: f64,
    pub seed: u64,
    pub category: Category,
    pub iou: f64,
    pub div_dist: Option<f64>,
    pub iterations: u64,
    pub complete: bool,
    pub micros: u64,
    #[serde(skip)]
    pub lane_length: f64,
    #[serde(skip)]
    pub length_ratio: f64,
    #[serde(skip)]
    pub hit_iteration: Option<u64>,
}

/// Result rows in a fixed order: track, range, fp rate, run, pose.
#[derive(Clone, Debug, Default)]
pub struct EvalResults {
    pub rows: Vec<InstanceResult>,
    /// Instances skipped because no GT cone was visible on some side.
    pub skipped: usize,
}

struct Run<'a> {
    track: &'a TrackRecord,
    region: &'a LaneRegion,
    range: f64,
    fp_rate: f64,
    seed: u64,
}

fn run_poses(run: &Run, cfg: &EvalConfig, weights: Option<&RankerWeights>) -> (Vec<InstanceResult>, usize) {
    let sim = SimConfig { perception_range: run.range, fp_rate: run.fp_rate, noise_sigma: cfg.noise_sigma, rng_seed: run.seed };
    let mut rows = Vec::with_capacity(run.track.poses.len());
    let mut skipped = 0;
    let mut warm: Option<Seed> = None;
    for pose_idx in 0..run.track.poses.len() {
        let s = match simulate_partial_map(run.track, pose_idx, &sim) {
            Ok(s) if s.gt.is_usable() => s,
            _ => {
                skipped += 1;
                continue;
            }
        };
        let points = s.map.points();
        let det = clc(&s.map, &s.pose, &cfg.detection, warm.as_ref().filter(|_| cfg.warmstart), weights);
        let (lane, iterations, complete, micros, hit) = match &det {
            Ok(d) => {
                let hit = cfg.hit_iou.and_then(|t| first_iteration_reaching(&d.candidates, points, &s.gt, t));
                (d.lane.as_ref(), d.diagnostics.iterations, d.diagnostics.complete, d.diagnostics.micros, hit)
            }
            Err(_) => (None, 0, true, 0, None),
        };
        let report = classify_prediction(lane, points, &s.gt, run.region);
        let lane_len = lane.map_or(0.0, |c| {
            let (l, r) = c.boundaries(points);
            lane_length(&l, &r)
        });
        warm = lane.map(|c| Seed::from_candidate(c, points));
        rows.push(InstanceResult {
            track: run.track.name.clone(),
            pose_idx,
            range: run.range,
            fp_rate: run.fp_rate,
            seed: run.seed,
            category: report.category,
            iou: report.iou,
            div_dist: report.divergence_distance,
            iterations,
            complete,
            micros: if cfg.record_timing { micros } else { 0 },
            lane_length: lane_len,
            length_ratio: report.length_ratio,
            hit_iteration: hit,
        });
    }
    (rows, skipped)
}

/// Seed of one run; independent of evaluation order and thread count.
pub fn run_seed(global: u64, track: &str, range: f64, fp_rate: f64, run: u32) -> u64 {
    let name = track.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    mix_seed(&[global, name, range.to_bits(), fp_rate.to_bits(), run as u64])
}

/// Simulates and detects every pose of every track for each setting.
/// Poses within one run share noise and chain warmstarts. `jobs` of 0 uses
/// all cores. Failed detections are recorded as `NoLane`.
pub fn run_evaluation(
    tracks: &[TrackRecord],
    cfg: &EvalConfig,
    weights: Option<&RankerWeights>,
    jobs: usize,
) -> Result<EvalResults> {
    cfg.validate()?;
    if tracks.is_empty() {
        return Err(Error::Config("no tracks to evaluate".into()));
    }
    let regions: Vec<LaneRegion> = tracks
        .iter()
        .map(|t| {
            let (mut l, mut r) = t.gt_points();
            if t.gt_closed {
                l.push(l[0]);
                r.push(r[0]);
            }
            LaneRegion::new(&l, &r)
        })
        .collect();
    let mut runs = Vec::new();
    for (t, region) in tracks.iter().zip(&regions) {
        for &range in &cfg.ranges {
            for &fp_rate in &cfg.fp_rates {
                for k in 0..cfg.seeds {
                    runs.push(Run { track: t, region, range, fp_rate, seed: run_seed(cfg.global_seed, &t.name, range, fp_rate, k) });
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let parts: Vec<(Vec<InstanceResult>, usize)> =
        pool.install(|| runs.par_iter().map(|r| run_poses(r, cfg, weights)).collect());
    let mut out = EvalResults::default();
    for (rows, skipped) in parts {
        out.rows.extend(rows);
        out.skipped += skipped;
    }
    Ok(out)
}

impl EvalResults {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for r in &self.rows {
            wr.serialize(r).map_err(|e| Error::Config(format!("csv: {e}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn summary(&self) -> Vec<GroupSummary> {
        let mut groups: BTreeMap<(u64, u64), Vec<&InstanceResult>> = BTreeMap::new();
        for r in &self.rows {
            groups.entry((r.range.to_bits(), r.fp_rate.to_bits())).or_default().push(r);
        }
        groups.into_values().map(|rows| GroupSummary::of(&rows)).collect()
    }

    /// Summary over the rows accepted by `keep`.
    pub fn summary_where(&self, keep: impl Fn(&InstanceResult) -> bool) -> GroupSummary {
        let rows: Vec<&InstanceResult> = self.rows.iter().filter(|r| keep(r)).collect();
        GroupSummary::of(&rows)
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>6} {:>5} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>7} {:>7} {:>8} {:>9}",
            "range", "fp", "n", "GT", "near", "short", "far", "crit", "none", "iou", "compl", "it_med", "us_med"
        );
        for g in self.summary() {
            let pct = |c: Category| 100.0 * g.rate(c);
            let _ = writeln!(
                s,
                "{:>6} {:>5} {:>6} {:>5.1}% {:>5.1}% {:>5.1}% {:>5.1}% {:>5.1}% {:>5.1}% {:>7.3} {:>6.1}% {:>8} {:>9}",
                g.range,
                g.fp_rate,
                g.count,
                pct(Category::Gt),
                pct(Category::NearGT),
                pct(Category::TooShort),
                pct(Category::DivergingFar),
                pct(Category::DivergingCritical),
                pct(Category::NoLane),
                g.mean_iou,
                100.0 * g.complete_rate,
                g.iterations.median,
                g.micros.median,
            );
        }
        if self.skipped > 0 {
            let _ = writeln!(s, "skipped {} instances without visible ground truth", self.skipped);
        }
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Distribution {
    pub median: u64,
    pub p95: u64,
    pub max: u64,
}

impl Distribution {
    pub fn of(mut v: Vec<u64>) -> Self {
        if v.is_empty() {
            return Self::default();
        }
        v.sort_unstable();
        let q = |f: f64| v[((v.len() - 1) as f64 * f).round() as usize];
        Distribution { median: q(0.5), p95: q(0.95), max: *v.last().unwrap() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GroupSummary {
    pub range: f64,
    pub fp_rate: f64,
    pub count: usize,
    pub categories: BTreeMap<Category, usize>,
    pub mean_iou: f64,
    pub complete_rate: f64,
    pub iterations: Distribution,
    pub micros: Distribution,
    /// Fraction of instances with a hit recorded within `hit_within` iterations.
    pub hit_rate_500: Option<f64>,
}

impl GroupSummary {
    fn of(rows: &[&InstanceResult]) -> Self {
        let n = rows.len();
        let mut categories = BTreeMap::new();
        for r in rows {
            *categories.entry(r.category).or_insert(0) += 1;
        }
        let mean = |f: &dyn Fn(&InstanceResult) -> f64| if n == 0 { 0.0 } else { rows.iter().map(|r| f(r)).sum::<f64>() / n as f64 };
        GroupSummary {
            range: rows.first().map_or(0.0, |r| r.range),
            fp_rate: rows.first().map_or(0.0, |r| r.fp_rate),
            count: n,
            categories,
            mean_iou: mean(&|r| r.iou),
            complete_rate: mean(&|r| if r.complete { 1.0 } else { 0.0 }),
            iterations: Distribution::of(rows.iter().map(|r| r.iterations).collect()),
            micros: Distribution::of(rows.iter().map(|r| r.micros).collect()),
            hit_rate_500: rows
                .iter()
                .any(|r| r.hit_iteration.is_some())
                .then(|| mean(&|r| if r.hit_iteration.is_some_and(|i| i <= 500) { 1.0 } else { 0.0 })),
        }
    }

    pub fn rate(&self, c: Category) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        *self.categories.get(&c).unwrap_or(&0) as f64 / self.count as f64
    }

    pub fn success_rate(&self) -> f64 {
        Category::ALL.iter().filter(|c| c.is_success()).map(|&c| self.rate(c)).sum()
    }
}
