//! Partial maps as seen from a pose: perception half-disc, noise and false positives.

use std::f64::consts::FRAC_PI_2;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::track::TrackRecord;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::graph::{CarPose, ConeColor, ConeMap};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Radius of the perception half-disc (m).
    pub perception_range: f64,
    /// Fraction of the output points that are false positives.
    pub fp_rate: f64,
    /// Standard deviation of the per-cone position noise (m).
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { perception_range: 30.0, fp_rate: 0.0, noise_sigma: 0.0, rng_seed: 0 }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.perception_range > 0.0 && self.perception_range.is_finite()) {
            return Err(Error::Config("perception_range must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.fp_rate) {
            return Err(Error::Config("fp_rate must lie in [0, 1)".into()));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::Config("noise_sigma must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Ground-truth boundaries restricted to what the car can see, as indices into
/// the simulated map.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VisibleGt {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// The whole ring of a closed track is visible.
    pub closed: bool,
}

impl VisibleGt {
    pub fn is_usable(&self) -> bool {
        !self.left.is_empty() && !self.right.is_empty()
    }

    pub fn points(&self, points: &[Point2]) -> (Vec<Point2>, Vec<Point2>) {
        let mut l: Vec<Point2> = self.left.iter().map(|&i| points[i]).collect();
        let mut r: Vec<Point2> = self.right.iter().map(|&i| points[i]).collect();
        if self.closed {
            l.push(l[0]);
            r.push(r[0]);
        }
        (l, r)
    }
}

#[derive(Clone, Debug)]
pub struct SimulatedMap {
    pub map: ConeMap,
    pub pose: CarPose,
    pub gt: VisibleGt,
    /// Per map point: injected rather than a track cone.
    pub false_positive: Vec<bool>,
    /// Map index of every track cone that is visible.
    pub track_to_map: Vec<Option<usize>>,
}

impl SimulatedMap {
    pub fn fp_count(&self) -> usize {
        self.false_positive.iter().filter(|&&b| b).count()
    }
}

pub fn in_half_disc(p: Point2, pose: &CarPose, range: f64) -> bool {
    let d = p - pose.position;
    d.norm() <= range && d.dot(pose.heading) >= 0.0
}

/// Number of injected points so that they make up `fp_rate` of the total.
pub fn fp_count(kept: usize, fp_rate: f64) -> usize {
    let x = fp_rate / (1.0 - fp_rate) * kept as f64;
    // Guard against 0.5/0.5*20 = 20.000000000000004 style rounding.
    (x - 1e-9).ceil().max(0.0) as usize
}

/// Persistent noise offsets for every track cone of one run.
pub fn cone_noise(n: usize, sigma: f64, seed: u64) -> Vec<Point2> {
    if sigma == 0.0 {
        return vec![Point2::new(0.0, 0.0); n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    (0..n).map(|_| Point2::new(normal.sample(&mut rng), normal.sample(&mut rng))).collect()
}

fn sample_half_disc(rng: &mut ChaCha8Rng, pose: &CarPose, range: f64) -> Point2 {
    let r = range * rng.random::<f64>().sqrt();
    let phi = pose.yaw() + rng.random_range(-FRAC_PI_2..=FRAC_PI_2);
    let p = pose.position + Point2::new(phi.cos(), phi.sin()) * r;
    if in_half_disc(p, pose, range) {
        p
    } else {
        // Rounding at the rim or the diameter; pull slightly inward.
        pose.position + (p - pose.position) * (1.0 - 1e-9) + pose.heading * 1e-9
    }
}

/// Longest run of visible cones on one GT boundary, starting at the cone
/// nearest to the car (or the one after it when that is not visible).
fn visible_run(gt: &[usize], closed: bool, pos: Point2, true_pts: &[Point2], visible: &[bool]) -> (Vec<usize>, bool) {
    let n = gt.len();
    let nearest = (0..n)
        .min_by(|&a, &b| true_pts[gt[a]].dist(pos).total_cmp(&true_pts[gt[b]].dist(pos)).then(a.cmp(&b)))
        .expect("nonempty GT");
    let mut start = nearest;
    if !visible[gt[start]] {
        if closed || start + 1 < n {
            start = (start + 1) % n;
        } else {
            return (Vec::new(), false);
        }
    }
    let mut out = Vec::new();
    let mut k = start;
    loop {
        if !visible[gt[k]] {
            break;
        }
        out.push(gt[k]);
        if out.len() == n {
            return (out, closed);
        }
        k += 1;
        if k == n {
            if !closed {
                break;
            }
            k = 0;
        }
    }
    (out, false)
}

/// Partial map for `track.poses[pose_index]`.
///
/// Noise offsets depend only on `cfg.rng_seed`, so they persist across the
/// poses of one run. False positives and point order depend on the seed and
/// the pose index.
pub fn simulate_partial_map(track: &TrackRecord, pose_index: usize, cfg: &SimConfig) -> Result<SimulatedMap> {
    cfg.validate()?;
    let pose = *track
        .poses
        .get(pose_index)
        .ok_or_else(|| Error::Config(format!("pose index {pose_index} out of range ({} poses)", track.poses.len())))?;
    let true_pts = track.cones.points();
    let noise = cone_noise(true_pts.len(), cfg.noise_sigma, cfg.rng_seed);
    let noisy: Vec<Point2> = true_pts.iter().zip(&noise).map(|(&p, &e)| p + e).collect();
    let visible: Vec<bool> = noisy.iter().map(|&p| in_half_disc(p, &pose, cfg.perception_range)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(super::mix_seed(&[cfg.rng_seed, pose_index as u64, 0xf0f0]));
    // (point, color, track index or None for injected)
    let mut items: Vec<(Point2, ConeColor, Option<usize>)> = (0..true_pts.len())
        .filter(|&i| visible[i])
        .map(|i| (noisy[i], track.cones.colors()[i], Some(i)))
        .collect();
    let kept = items.len();
    for _ in 0..fp_count(kept, cfg.fp_rate) {
        items.push((sample_half_disc(&mut rng, &pose, cfg.perception_range), ConeColor::Unknown, None));
    }
    items.shuffle(&mut rng);

    let (points, colors): (Vec<Point2>, Vec<ConeColor>) = items.iter().map(|&(p, c, _)| (p, c)).unzip();
    let (map, mapping) = ConeMap::with_colors(points, colors)?;
    let mut track_to_map = vec![None; true_pts.len()];
    let mut false_positive = vec![true; map.len()];
    for (k, &(_, _, src)) in items.iter().enumerate() {
        if let Some(i) = src {
            track_to_map[i] = Some(mapping[k]);
            false_positive[mapping[k]] = false;
        }
    }

    let (l, lc) = visible_run(&track.gt_left, track.gt_closed, pose.position, true_pts, &visible);
    let (r, rc) = visible_run(&track.gt_right, track.gt_closed, pose.position, true_pts, &visible);
    let remap = |v: Vec<usize>| -> Vec<usize> { v.into_iter().map(|i| track_to_map[i].expect("visible")).collect() };
    let gt = VisibleGt { left: remap(l), right: remap(r), closed: lc && rc };
    Ok(SimulatedMap { map, pose, gt, false_positive, track_to_map })
}
