//! Turning open candidates into closed circuits.

use crate::geometry::MatchingState;
use crate::graph::{DetectionConfig, SearchGraph};

use super::constraints::{check_closed_lane, close_chain};
use super::LaneCandidate;

/// Closed variant of `candidate` when both paths have at least three vertices,
/// the graph joins each path's last vertex back to its first, and the closed
/// lane still satisfies every constraint.
pub fn try_close(candidate: &LaneCandidate, graph: &SearchGraph, cfg: &DetectionConfig) -> Option<LaneCandidate> {
    if candidate.closed {
        return None;
    }
    let (l, r) = (&candidate.pair.left, &candidate.pair.right);
    if l.len() < 3 || r.len() < 3 {
        return None;
    }
    if !graph.has_edge(l[l.len() - 1], l[0]) || !graph.has_edge(r[r.len() - 1], r[0]) {
        return None;
    }
    let lp: Vec<_> = l.iter().map(|&v| graph.point(v)).collect();
    let rp: Vec<_> = r.iter().map(|&v| graph.point(v)).collect();
    if !check_closed_lane(&lp, &rp, cfg) {
        return None;
    }
    Some(LaneCandidate {
        pair: candidate.pair.clone(),
        closed: true,
        matching: MatchingState::from_batch(&close_chain(&lp), &close_chain(&rp)),
        constraint_ok: true,
        found_at_iteration: candidate.found_at_iteration,
    })
}
