//! Candidate enumeration and the full detection pipeline.

pub mod closing;
pub mod constraints;
pub mod enumerate;
pub mod heuristics;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{MatchingState, Point2};
use crate::graph::{construct_search_graph, find_starting_vertices_widening, CarPose, ConeMap, DetectionConfig};
use crate::ranker::{fallback_rank, most_likely_candidate, RankerWeights};

pub use closing::try_close;
pub use constraints::{btd, check_closed_lane, check_open_lane, LaneState, NodeStatus};
pub use enumerate::{epp, epp_with, EppOptions, EppResult, Expansion};
pub use heuristics::{lrd, nvd, NvdMemo};

/// Seed vertices are re-matched to the new map within this distance (m).
pub const REASSOCIATION_RADIUS: f64 = 0.5;

/// Left and right vertex paths of a candidate lane.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathPair {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl PathPair {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Self {
        PathPair { left, right }
    }

    pub fn len(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }

    /// Both paths of `self` are prefixes of the paths of `other`.
    pub fn is_prefix_of(&self, other: &PathPair) -> bool {
        other.left.starts_with(&self.left) && other.right.starts_with(&self.right)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaneCandidate {
    pub pair: PathPair,
    /// Each boundary continues from its last vertex back to its first.
    pub closed: bool,
    pub matching: MatchingState,
    pub constraint_ok: bool,
    /// Enumeration iteration at which the pair was first recorded.
    pub found_at_iteration: u64,
}

impl LaneCandidate {
    /// Boundary polylines; a closed candidate repeats its first point at the end.
    pub fn boundaries(&self, points: &[Point2]) -> (Vec<Point2>, Vec<Point2>) {
        let mut l: Vec<Point2> = self.pair.left.iter().map(|&v| points[v]).collect();
        let mut r: Vec<Point2> = self.pair.right.iter().map(|&v| points[v]).collect();
        if self.closed {
            l.push(l[0]);
            r.push(r[0]);
        }
        (l, r)
    }

    pub fn widths(&self) -> Vec<f64> {
        self.matching.widths()
    }
}

/// A previous detection in map coordinates, used to warmstart the next one.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub left: Vec<Point2>,
    pub right: Vec<Point2>,
}

impl Seed {
    pub fn from_candidate(candidate: &LaneCandidate, points: &[Point2]) -> Self {
        Seed {
            left: candidate.pair.left.iter().map(|&v| points[v]).collect(),
            right: candidate.pair.right.iter().map(|&v| points[v]).collect(),
        }
    }
}

fn nearest_within(points: &[Point2], q: Point2, radius: f64) -> Option<usize> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.dist(q), i))
        .filter(|&(d, _)| d <= radius)
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, i)| i)
}

/// Maps seed points to their nearest map points within `radius`. Leading
/// points without a match (already behind the car) are skipped; each side then
/// stops at the next point without a match.
pub fn reassociate(seed: &Seed, map: &ConeMap, radius: f64) -> PathPair {
    let side = |pts: &[Point2]| -> Vec<usize> {
        pts.iter()
            .map(|&q| nearest_within(map.points(), q, radius))
            .skip_while(Option::is_none)
            .map_while(|v| v)
            .collect()
    };
    PathPair { left: side(&seed.left), right: side(&seed.right) }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: u64,
    /// Candidate count including closed variants.
    pub candidates: usize,
    pub complete: bool,
    pub reduced: bool,
    pub micros: u64,
    pub start: (usize, usize),
    pub warmstarted: bool,
}

#[derive(Clone, Debug)]
pub struct Detection {
    /// Most likely lane, or `None` when no pair satisfies the constraints.
    pub lane: Option<LaneCandidate>,
    pub candidates: Vec<LaneCandidate>,
    pub diagnostics: Diagnostics,
}

/// Full detection: graph, start vertices, enumeration, closing, ranking.
///
/// Without `ranker` the longest candidate wins.
pub fn clc(
    map: &ConeMap,
    pose: &CarPose,
    cfg: &DetectionConfig,
    warmstart: Option<&Seed>,
    ranker: Option<&RankerWeights>,
) -> Result<Detection> {
    cfg.validate()?;
    let t0 = Instant::now();
    let graph = construct_search_graph(map, cfg.d_max);
    let start = find_starting_vertices_widening(map, pose, cfg.start_radius)?;
    let seed = warmstart.map(|s| {
        let mut pair = reassociate(s, map, REASSOCIATION_RADIUS);
        for side in [&mut pair.left, &mut pair.right] {
            side.truncate(side.len().saturating_sub(cfg.warmstart_trim).max(1.min(side.len())));
        }
        pair
    });
    let res = epp(&graph, start, pose.heading, cfg, seed.as_ref());
    let mut candidates = res.candidates;
    let closed: Vec<LaneCandidate> = candidates.iter().filter_map(|c| try_close(c, &graph, cfg)).collect();
    candidates.extend(closed);
    let lane = if candidates.is_empty() {
        None
    } else {
        let idx = match ranker {
            Some(w) => most_likely_candidate(&candidates, map.points(), w)?,
            None => fallback_rank(&candidates, map.points())?,
        };
        Some(candidates[idx].clone())
    };
    let diagnostics = Diagnostics {
        iterations: res.iterations,
        candidates: candidates.len(),
        complete: res.complete,
        reduced: res.reduced,
        micros: t0.elapsed().as_micros() as u64,
        start,
        warmstarted: seed.is_some(),
    };
    Ok(Detection { lane, candidates, diagnostics })
}
