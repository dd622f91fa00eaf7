//! Synthetic race tracks with a known ground-truth lane.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::track::TrackRecord;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::graph::{CarPose, ConeColor, ConeMap, DetectionConfig};

const STEP: f64 = 0.05;
const MAX_ATTEMPTS: usize = 100;

/// Centerline curvature (1/m, positive turns left) as a function of arc length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CurvatureProfile {
    Straight,
    /// Closed circle of the given centerline radius; the track length is ignored.
    Ring { radius: f64 },
    /// Piecewise-constant `(length, curvature)` pieces; the last one extends to the end.
    Pieces(Vec<(f64, f64)>),
    /// Random pieces with lengths in `piece_length` and curvature within `±max_curvature`;
    /// about a third of them are straight.
    Random { max_curvature: f64, piece_length: (f64, f64) },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub name: String,
    pub length: f64,
    pub lane_width: f64,
    pub cone_spacing: f64,
    pub profile: CurvatureProfile,
    /// Distance between consecutive poses along the centerline (at least 1 m).
    pub pose_spacing: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            name: "synthetic".into(),
            length: 100.0,
            lane_width: 3.5,
            cone_spacing: 4.0,
            profile: CurvatureProfile::Straight,
            pose_spacing: 5.0,
            seed: 0,
        }
    }
}

impl SynthParams {
    fn validate(&self, cfg: &DetectionConfig) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("synthetic track: {m}")));
        if !(3.0..=5.0).contains(&self.lane_width) || self.lane_width <= cfg.w_min || self.lane_width >= cfg.w_max {
            return bad("lane width must lie in [3, 5] and inside (w_min, w_max)");
        }
        if !(self.cone_spacing > 0.5 && self.cone_spacing <= cfg.d_max) {
            return bad("cone spacing must be in (0.5, d_max]");
        }
        if !(self.length > 0.0) {
            return bad("length must be positive");
        }
        if !(self.pose_spacing >= 1.0) {
            return bad("pose spacing must be at least 1 m");
        }
        Ok(())
    }

    fn closed(&self) -> bool {
        matches!(self.profile, CurvatureProfile::Ring { .. })
    }
}

/// Dense centerline samples: positions and headings every `STEP` metres.
fn centerline(params: &SynthParams, rng: &mut ChaCha8Rng) -> (Vec<Point2>, Vec<f64>) {
    let (length, pieces): (f64, Vec<(f64, f64)>) = match &params.profile {
        CurvatureProfile::Straight => (params.length, vec![(params.length, 0.0)]),
        CurvatureProfile::Ring { radius } => (TAU * radius, vec![(TAU * radius, 1.0 / radius)]),
        CurvatureProfile::Pieces(p) => (params.length, p.clone()),
        CurvatureProfile::Random { max_curvature, piece_length } => {
            let mut v = Vec::new();
            let mut total = 0.0;
            while total < params.length {
                let len = rng.random_range(piece_length.0..=piece_length.1);
                let k = if rng.random_bool(1.0 / 3.0) {
                    0.0
                } else {
                    rng.random_range(-max_curvature..=*max_curvature)
                };
                v.push((len, k));
                total += len;
            }
            (params.length, v)
        }
    };
    let n = (length / STEP).round() as usize;
    let ds = length / n as f64;
    let curvature_at = |s: f64| {
        let mut acc = 0.0;
        for &(len, k) in &pieces {
            acc += len;
            if s < acc {
                return k;
            }
        }
        pieces.last().map_or(0.0, |p| p.1)
    };
    let mut pos = Vec::with_capacity(n + 1);
    let mut head = Vec::with_capacity(n + 1);
    let (mut p, mut th) = (Point2::new(0.0, 0.0), 0.0f64);
    for i in 0..=n {
        pos.push(p);
        head.push(th);
        let k = curvature_at((i as f64 + 0.5) * ds);
        let mid = th + 0.5 * k * ds;
        p = p + Point2::new(mid.cos(), mid.sin()) * ds;
        th += k * ds;
    }
    (pos, head)
}

fn normal(theta: f64) -> Point2 {
    Point2::new(-theta.sin(), theta.cos())
}

/// Resamples a dense polyline at equal arc length; returns cone positions and
/// the dense index each cone came from.
fn resample(dense: &[Point2], spacing: f64, closed: bool) -> Vec<(Point2, usize)> {
    let mut cum = vec![0.0];
    for w in dense.windows(2) {
        cum.push(cum.last().unwrap() + w[0].dist(w[1]));
    }
    let total = *cum.last().unwrap();
    let (count, step) = if closed {
        let c = (total / spacing).round().max(3.0) as usize;
        (c, total / c as f64)
    } else {
        ((total / spacing + 1e-9).floor() as usize + 1, spacing)
    };
    let mut out = Vec::with_capacity(count);
    let mut j = 0;
    for k in 0..count {
        let s = k as f64 * step;
        while j + 1 < cum.len() - 1 && cum[j + 1] < s {
            j += 1;
        }
        let seg = cum[j + 1] - cum[j];
        let t = if seg > 0.0 { ((s - cum[j]) / seg).clamp(0.0, 1.0) } else { 0.0 };
        out.push((dense[j] + (dense[j + 1] - dense[j]) * t, j));
    }
    out
}

fn build(params: &SynthParams, rng: &mut ChaCha8Rng) -> TrackRecord {
    let closed = params.closed();
    let (center, heading) = centerline(params, rng);
    let half = params.lane_width / 2.0;
    let mut dense_l: Vec<Point2> = center.iter().zip(&heading).map(|(&c, &t)| c + normal(t) * half).collect();
    let mut dense_r: Vec<Point2> = center.iter().zip(&heading).map(|(&c, &t)| c - normal(t) * half).collect();
    if closed {
        // The last sample coincides with the first.
        dense_l.pop();
        dense_r.pop();
        dense_l.push(dense_l[0]);
        dense_r.push(dense_r[0]);
    }
    let left = resample(&dense_l, params.cone_spacing, closed);
    let right = resample(&dense_r, params.cone_spacing, closed);

    let mut points: Vec<Point2> = left.iter().map(|c| c.0).collect();
    points.extend(right.iter().map(|c| c.0));
    let mut colors = vec![ConeColor::Left; left.len()];
    colors.extend(vec![ConeColor::Right; right.len()]);
    let gt_left: Vec<usize> = (0..left.len()).collect();
    let gt_right: Vec<usize> = (left.len()..left.len() + right.len()).collect();

    // Poses sit 0.75 m behind the nearer cone of a left/right pair that is
    // well aligned along the centerline, so both start cones are close even
    // under position noise.
    let total = (center.len() - 1) as f64 * STEP;
    let back = (0.75 / STEP).round() as usize;
    let mut poses = Vec::new();
    let mut s = 0.0;
    while s < total - params.cone_spacing {
        let pairs: Vec<(usize, usize)> = left
            .iter()
            .map(|c| c.1)
            .filter(|&i| i as f64 * STEP >= s)
            .take(2)
            .map(|il| (il, right.iter().map(|c| c.1).min_by_key(|&j| j.abs_diff(il)).expect("nonempty")))
            .collect();
        let Some(&(il, ir)) = pairs.iter().min_by_key(|(l, r)| l.abs_diff(*r)) else { break };
        let i = il.min(ir);
        let pose = if i >= back {
            CarPose::from_yaw(center[i - back], heading[i - back])
        } else {
            let t = heading[0];
            CarPose::from_yaw(center[0] - Point2::new(t.cos(), t.sin()) * ((back - i) as f64 * STEP), t)
        };
        if poses.last().is_none_or(|p: &CarPose| p.position.dist(pose.position) >= 1.0) {
            poses.push(pose);
        }
        s = il as f64 * STEP + params.pose_spacing;
    }
    let (cones, mapping) = ConeMap::with_colors(points, colors).expect("finite points");
    let gt_left = gt_left.into_iter().map(|i| mapping[i]).collect();
    let gt_right = gt_right.into_iter().map(|i| mapping[i]).collect();
    TrackRecord { name: params.name.clone(), cones, poses, gt_left, gt_right, gt_closed: closed }
}

/// Generates a track whose ground-truth lane satisfies the default constraints.
/// Random profiles are redrawn up to 100 times.
pub fn generate_synthetic_track(params: &SynthParams) -> Result<TrackRecord> {
    let cfg = DetectionConfig::default();
    params.validate(&cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut last_err = None;
    for _ in 0..MAX_ATTEMPTS {
        let t = build(params, &mut rng);
        match t.validate(&cfg) {
            Ok(()) => return Ok(t),
            Err(e) => last_err = Some(e),
        }
        if !matches!(params.profile, CurvatureProfile::Random { .. }) {
            break;
        }
    }
    Err(last_err.unwrap_or_else(|| Error::InvalidTrack("generation failed".into())))
}

/// Random winding tracks used by the benchmark suite.
pub fn benchmark_tracks(count: usize, length: f64, seed: u64) -> Result<Vec<TrackRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let params = SynthParams {
                name: format!("bench{i:02}"),
                length,
                lane_width: rng.random_range(3.0..=5.0),
                cone_spacing: rng.random_range(3.0..=5.0),
                profile: CurvatureProfile::Random { max_curvature: 1.0 / 12.0, piece_length: (10.0, 30.0) },
                pose_spacing: 5.0,
                seed: rng.random(),
            };
            generate_synthetic_track(&params)
        })
        .collect()
}
