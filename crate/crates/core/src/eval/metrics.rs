//! Prediction quality: IoU, divergence distance and categories.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sim::VisibleGt;
use crate::geometry::{
    distance_to_rings, eval_polyline, point_in_rings, polygon_iou, polyline_length, LanePolygon, MatchingState, Point2,
    DEFAULT_IOU_RESOLUTION,
};
use crate::search::LaneCandidate;

/// Dilation of the GT region when testing whether the prediction left it (m).
pub const DIVERGENCE_TOLERANCE: f64 = 0.25;
/// Divergence closer than this is critical (m).
pub const CRITICAL_DISTANCE: f64 = 20.0;
/// Below this fraction of the GT length a prediction is too short.
pub const SHORT_RATIO: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "GT")]
    Gt,
    NearGT,
    TooShort,
    DivergingFar,
    DivergingCritical,
    NoLane,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Gt,
        Category::NearGT,
        Category::TooShort,
        Category::DivergingFar,
        Category::DivergingCritical,
        Category::NoLane,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Gt => "GT",
            Category::NearGT => "NearGT",
            Category::TooShort => "TooShort",
            Category::DivergingFar => "DivergingFar",
            Category::DivergingCritical => "DivergingCritical",
            Category::NoLane => "NoLane",
        }
    }

    /// Anything that is neither a critical divergence nor missing.
    pub fn is_success(self) -> bool {
        !matches!(self, Category::DivergingCritical | Category::NoLane)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Category::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown category '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub iou: f64,
    pub diverges: bool,
    /// Arc length before the first point outside the GT region.
    pub divergence_distance: Option<f64>,
    pub length_ratio: f64,
    pub category: Category,
}

/// Category from the measured quantities; total over all inputs.
pub fn categorize(exact: bool, divergence_distance: Option<f64>, length_ratio: f64) -> Category {
    if exact {
        Category::Gt
    } else if let Some(d) = divergence_distance {
        if d < CRITICAL_DISTANCE {
            Category::DivergingCritical
        } else {
            Category::DivergingFar
        }
    } else if length_ratio < SHORT_RATIO {
        Category::TooShort
    } else {
        Category::NearGT
    }
}

/// Area covered by a lane, as quadrilaterals between consecutive matching lines.
#[derive(Clone, Debug)]
pub struct LaneRegion {
    quads: Vec<[Point2; 4]>,
    boxes: Vec<[f64; 4]>,
}

impl LaneRegion {
    /// `left`/`right` repeat their first point when the lane is closed.
    pub fn new(left: &[Point2], right: &[Point2]) -> Self {
        let lines = matching_segments(left, right);
        let quads: Vec<[Point2; 4]> = lines.windows(2).map(|w| [w[0].0, w[1].0, w[1].1, w[0].1]).collect();
        let boxes = quads
            .iter()
            .map(|q| {
                let xs = q.map(|p| p.x);
                let ys = q.map(|p| p.y);
                [
                    xs.iter().copied().fold(f64::INFINITY, f64::min),
                    ys.iter().copied().fold(f64::INFINITY, f64::min),
                    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                ]
            })
            .collect();
        LaneRegion { quads, boxes }
    }

    /// Inside some quadrilateral or within `tol` of one.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.quads.iter().zip(&self.boxes).any(|(q, b)| {
            if p.x < b[0] - tol || p.x > b[2] + tol || p.y < b[1] - tol || p.y > b[3] + tol {
                return false;
            }
            let ring = [q.to_vec()];
            point_in_rings(p, &ring) || distance_to_rings(p, &ring) <= tol
        })
    }
}

/// Endpoints of the matching lines in parameter order.
fn matching_segments(left: &[Point2], right: &[Point2]) -> Vec<(Point2, Point2)> {
    if left.is_empty() || right.is_empty() {
        return Vec::new();
    }
    MatchingState::from_batch(left, right)
        .lines()
        .iter()
        .map(|l| {
            (
                eval_polyline(left, l.param.u).expect("param in domain"),
                eval_polyline(right, l.param.v).expect("param in domain"),
            )
        })
        .collect()
}

/// Midpoints of the matching lines, ordered along the lane.
pub fn centerline(left: &[Point2], right: &[Point2]) -> Vec<Point2> {
    matching_segments(left, right).into_iter().map(|(a, b)| (a + b) * 0.5).collect()
}

/// Arc length along the predicted centerline up to its first point outside
/// `region` (dilated by `tol`); `None` when it stays inside.
pub fn divergence(left: &[Point2], right: &[Point2], region: &LaneRegion, tol: f64) -> Option<f64> {
    let c = centerline(left, right);
    let mut s = 0.0;
    for (i, &p) in c.iter().enumerate() {
        if i > 0 {
            s += c[i - 1].dist(p);
        }
        if !region.contains(p, tol) {
            return Some(s);
        }
    }
    None
}

pub fn lane_length(left: &[Point2], right: &[Point2]) -> f64 {
    0.5 * (polyline_length(left) + polyline_length(right))
}

pub fn lane_iou(a: (&[Point2], &[Point2]), b: (&[Point2], &[Point2])) -> f64 {
    polygon_iou(
        &LanePolygon::from_boundaries(a.0, a.1),
        &LanePolygon::from_boundaries(b.0, b.1),
        DEFAULT_IOU_RESOLUTION,
    )
    .iou
}

/// Scores a prediction against the visible GT. `region` is the area the car
/// may legitimately drive in (usually the full GT lane of the track).
pub fn classify_prediction(
    predicted: Option<&LaneCandidate>,
    points: &[Point2],
    gt: &VisibleGt,
    region: &LaneRegion,
) -> PredictionReport {
    let Some(pred) = predicted else {
        return PredictionReport {
            iou: 0.0,
            diverges: false,
            divergence_distance: None,
            length_ratio: 0.0,
            category: Category::NoLane,
        };
    };
    let (pl, pr) = pred.boundaries(points);
    let (gl, gr) = gt.points(points);
    let iou = lane_iou((&pl, &pr), (&gl, &gr));
    let div = divergence(&pl, &pr, region, DIVERGENCE_TOLERANCE);
    let gt_len = lane_length(&gl, &gr);
    let length_ratio = if gt_len > 0.0 { lane_length(&pl, &pr) / gt_len } else { f64::INFINITY };
    let exact = pred.pair.left == gt.left && pred.pair.right == gt.right && pred.closed == gt.closed;
    PredictionReport {
        iou,
        diverges: div.is_some(),
        divergence_distance: div,
        length_ratio,
        category: categorize(exact, div, length_ratio),
    }
}

/// Smallest enumeration iteration at which some candidate reached `threshold`
/// IoU against the visible GT.
pub fn first_iteration_reaching(cands: &[LaneCandidate], points: &[Point2], gt: &VisibleGt, threshold: f64) -> Option<u64> {
    let (gl, gr) = gt.points(points);
    let gt_area = LanePolygon::from_boundaries(&gl, &gr).area();
    let mut order: Vec<&LaneCandidate> = cands.iter().collect();
    order.sort_by_key(|c| c.found_at_iteration);
    order.into_iter().find_map(|c| {
        let (l, r) = c.boundaries(points);
        let area = LanePolygon::from_boundaries(&l, &r).area();
        // IoU is at most the ratio of the smaller to the larger area.
        if area.min(gt_area) < threshold * area.max(gt_area) {
            return None;
        }
        (lane_iou((&l, &r), (&gl, &gr)) >= threshold).then_some(c.found_at_iteration)
    })
}
