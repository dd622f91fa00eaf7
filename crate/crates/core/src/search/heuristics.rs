//! Next-vertex and left/right deciders.

use std::collections::HashMap;

use crate::geometry::{angle_between, Point2, Side};
use crate::graph::SearchGraph;

/// Direction of the last segment of `path`, or `heading` for a single point.
fn last_direction(path: &[Point2], heading: Point2) -> Point2 {
    match path {
        [.., a, b] => *b - *a,
        _ => heading,
    }
}

/// Candidate continuing `path` with the smallest absolute turn; ties go to the
/// smaller id. `None` when there are no candidates.
pub fn nvd(path: &[Point2], candidates: &[(usize, Point2)], heading: Point2) -> Option<usize> {
    let last = *path.last()?;
    let dir = last_direction(path, heading);
    candidates
        .iter()
        .map(|&(id, q)| (angle_between(dir, q - last), id))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, id)| id)
}

/// Angles between each boundary's last segment and the segment joining the
/// two last points.
fn advancement(left: &[Point2], right: &[Point2], heading: Point2) -> f64 {
    let ln = *left.last().expect("nonempty");
    let rm = *right.last().expect("nonempty");
    let theta_l = angle_between(last_direction(left, heading), rm - ln);
    let theta_r = angle_between(last_direction(right, heading), ln - rm);
    (theta_r - theta_l).abs()
}

/// Chooses which boundary to extend: left iff extending it by `n0` yields the
/// smaller angle deviation than extending the right one by `n1`. A chain with
/// a single point uses the car heading as its last segment; when both chains
/// are single points the left side is chosen.
pub fn lrd(left: &[Point2], right: &[Point2], n0: Point2, n1: Point2, heading: Point2) -> Side {
    if left.len() == 1 && right.len() == 1 {
        return Side::Left;
    }
    let mut l1 = left.to_vec();
    l1.push(n0);
    let mut r2 = right.to_vec();
    r2.push(n1);
    let d1 = advancement(&l1, right, heading);
    let d2 = advancement(left, &r2, heading);
    if d1 < d2 {
        Side::Left
    } else {
        Side::Right
    }
}

/// Memoized neighbour rankings for the next-vertex decider, keyed by the
/// last two vertices of a path.
#[derive(Debug, Default)]
pub struct NvdMemo {
    ranked: HashMap<(usize, usize), Vec<usize>>,
}

impl NvdMemo {
    pub fn new() -> Self {
        Self::default()
    }

    /// Neighbours of `cur` sorted by absolute turn from the segment `prev → cur`
    /// (or from `heading` without `prev`), then by id.
    pub fn ranked(&mut self, graph: &SearchGraph, prev: Option<usize>, cur: usize, heading: Point2) -> &[usize] {
        let key = (prev.unwrap_or(usize::MAX), cur);
        self.ranked.entry(key).or_insert_with(|| {
            let c = graph.point(cur);
            let dir = match prev {
                Some(p) => c - graph.point(p),
                None => heading,
            };
            let mut v: Vec<(f64, usize)> = graph
                .neighbors(cur)
                .iter()
                .map(|&u| (angle_between(dir, graph.point(u) - c), u))
                .collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            v.into_iter().map(|(_, u)| u).collect()
        })
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }
}
