//! The eight lane statistics the ranker scores.

use crate::geometry::{polyline_length, signed_angle, Point2};
use crate::search::LaneCandidate;

pub const FEATURE_DIM: usize = 8;

/// `[mean boundary length, left points, right points, var(width),
///   var(left segment length), var(right segment length),
///   var(left turn angle), var(right turn angle)]`
pub type FeatureVector = [f64; FEATURE_DIM];

/// Population variance; zero for fewer than two samples.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

fn segment_lengths(pts: &[Point2]) -> Vec<f64> {
    pts.windows(2).map(|w| w[0].dist(w[1])).collect()
}

fn turn_angles(pts: &[Point2]) -> Vec<f64> {
    pts.windows(3).map(|w| signed_angle(w[1] - w[0], w[2] - w[1])).collect()
}

/// Features of a lane given its boundary polylines, point counts and widths.
pub fn features_from_parts(
    left: &[Point2],
    right: &[Point2],
    counts: (usize, usize),
    widths: &[f64],
) -> FeatureVector {
    [
        0.5 * (polyline_length(left) + polyline_length(right)),
        counts.0 as f64,
        counts.1 as f64,
        variance(widths),
        variance(&segment_lengths(left)),
        variance(&segment_lengths(right)),
        variance(&turn_angles(left)),
        variance(&turn_angles(right)),
    ]
}

pub fn extract_features(candidate: &LaneCandidate, points: &[Point2]) -> FeatureVector {
    let (l, r) = candidate.boundaries(points);
    let counts = (candidate.pair.left.len(), candidate.pair.right.len());
    features_from_parts(&l, &r, counts, &candidate.widths())
}
