//! Picking the most likely lane from a candidate set.

use std::cmp::Ordering;

use super::features::extract_features;
use super::net::RankerWeights;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::search::LaneCandidate;

/// Total order used for tie-breaking: the first of equal keys wins.
fn argmax_by(cands: &[LaneCandidate], key: impl Fn(&LaneCandidate) -> (f64, f64)) -> Result<usize> {
    if cands.is_empty() {
        return Err(Error::NoCandidates);
    }
    let keys: Vec<(f64, f64)> = cands.iter().map(key).collect();
    let better = |i: usize, j: usize| -> Ordering {
        keys[i]
            .0
            .total_cmp(&keys[j].0)
            .then(keys[i].1.total_cmp(&keys[j].1))
            .then_with(|| (&cands[j].pair, cands[j].closed).cmp(&(&cands[i].pair, cands[i].closed)))
    };
    Ok((1..cands.len()).fold(0, |best, i| if better(i, best) == Ordering::Greater { i } else { best }))
}

/// Index of the highest-scoring candidate. Ties go to the longer lane, then to
/// the lexicographically smaller vertex sequence.
pub fn most_likely_candidate(cands: &[LaneCandidate], points: &[Point2], w: &RankerWeights) -> Result<usize> {
    argmax_by(cands, |c| {
        let f = extract_features(c, points);
        (w.score(&f), f[0])
    })
}

/// Index of the longest candidate. Ties go to more boundary points, then to
/// the lexicographically smaller vertex sequence.
pub fn fallback_rank(cands: &[LaneCandidate], points: &[Point2]) -> Result<usize> {
    argmax_by(cands, |c| {
        let f = extract_features(c, points);
        (f[0], f[1] + f[2])
    })
}
