//! Brute-force enumeration of feasible path pairs on small graphs.
//!
//! Every pair of vertex-disjoint simple paths from the start vertices is
//! generated without any pruning and filtered by [`reference_cd`], a
//! from-scratch constraint check that shares no code with the search module.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, segments_intersect, Point2, Segment};
use crate::graph::{DetectionConfig, SearchGraph};
use crate::search::PathPair;

pub const ORACLE_VERTEX_LIMIT: usize = 12;

fn turn_angle(a: Point2, b: Point2, c: Point2) -> f64 {
    let (u, v) = (b - a, c - b);
    (u.dot(v) / (u.norm() * v.norm())).clamp(-1.0, 1.0).acos()
}

fn seg_seg_distance(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    if segments_intersect(Segment::new(a, b), Segment::new(c, d)) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Nearest distances from every vertex and segment of `q` to the chain `t`.
fn query_distances(q: &[Point2], t: &[Point2]) -> Vec<f64> {
    let mut out = Vec::new();
    for &p in q {
        let d = if t.len() == 1 {
            p.dist(t[0])
        } else {
            t.windows(2).map(|s| point_segment_distance(p, s[0], s[1])).fold(f64::INFINITY, f64::min)
        };
        out.push(d);
    }
    for s in q.windows(2) {
        let d = if t.len() == 1 {
            point_segment_distance(t[0], s[0], s[1])
        } else {
            t.windows(2).map(|w| seg_seg_distance(s[0], s[1], w[0], w[1])).fold(f64::INFINITY, f64::min)
        };
        out.push(d);
    }
    out
}

fn polygon_simple(left: &[Point2], right: &[Point2]) -> bool {
    let ring: Vec<Point2> = left.iter().chain(right.iter().rev()).copied().collect();
    let k = ring.len();
    if k < 4 {
        return true;
    }
    for i in 0..k {
        for j in i + 2..k {
            if i == 0 && j == k - 1 {
                continue;
            }
            let a = Segment::new(ring[i], ring[(i + 1) % k]);
            let b = Segment::new(ring[j], ring[(j + 1) % k]);
            if segments_intersect(a, b) {
                return false;
            }
        }
    }
    true
}

/// From-scratch constraint decider for an open lane.
pub fn reference_cd(left: &[Point2], right: &[Point2], cfg: &DetectionConfig) -> bool {
    let angles_ok = |c: &[Point2]| c.windows(3).all(|w| turn_angle(w[0], w[1], w[2]) < cfg.theta_max);
    if !angles_ok(left) || !angles_ok(right) {
        return false;
    }
    let widths_ok = query_distances(left, right)
        .into_iter()
        .chain(query_distances(right, left))
        .all(|w| cfg.w_min < w && w < cfg.w_max);
    widths_ok && polygon_simple(left, right)
}

fn simple_paths(graph: &SearchGraph, start: usize, forbidden: usize) -> Vec<(Vec<usize>, u32)> {
    fn rec(graph: &SearchGraph, path: &mut Vec<usize>, mask: u32, out: &mut Vec<(Vec<usize>, u32)>) {
        out.push((path.clone(), mask));
        let last = *path.last().expect("nonempty");
        for &u in graph.neighbors(last) {
            if mask & (1 << u) == 0 {
                path.push(u);
                rec(graph, path, mask | (1 << u), out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(graph, &mut vec![start], (1 << start) | (1 << forbidden), &mut out);
    for (_, m) in &mut out {
        *m &= !(1 << forbidden);
    }
    out
}

/// All vertex-disjoint simple path pairs from `start` that satisfy the
/// constraints.
pub fn brute_force_enumerate(
    graph: &SearchGraph,
    start: (usize, usize),
    cfg: &DetectionConfig,
) -> Result<BTreeSet<PathPair>> {
    let n = graph.vertex_count();
    if n > ORACLE_VERTEX_LIMIT {
        return Err(Error::OracleLimit { vertices: n, limit: ORACLE_VERTEX_LIMIT });
    }
    let pts = graph.points();
    let lefts = simple_paths(graph, start.0, start.1);
    let rights = simple_paths(graph, start.1, start.0);
    let chain = |p: &[usize]| -> Vec<Point2> { p.iter().map(|&v| pts[v]).collect() };
    let lefts: Vec<_> = lefts.into_iter().map(|(p, m)| (chain(&p), p, m)).collect();
    let rights: Vec<_> = rights.into_iter().map(|(p, m)| (chain(&p), p, m)).collect();
    let mut out = BTreeSet::new();
    for (lp, l, lm) in &lefts {
        for (rp, r, rm) in &rights {
            if lm & rm == 0 && reference_cd(lp, rp, cfg) {
                out.insert(PathPair::new(l.clone(), r.clone()));
            }
        }
    }
    Ok(out)
}
