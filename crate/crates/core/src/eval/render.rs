//! SVG pictures of a map with ground truth and prediction.

use std::fmt::Write as _;

use crate::geometry::{LanePolygon, Point2};
use crate::graph::CarPose;

/// A lane drawn as one filled polygon.
#[derive(Clone, Debug)]
pub struct LaneLayer {
    pub left: Vec<Point2>,
    pub right: Vec<Point2>,
    pub fill: String,
    pub label: String,
}

#[derive(Clone, Debug, Default)]
pub struct Scene {
    pub points: Vec<Point2>,
    /// Points drawn in the highlight colour (e.g. injected false positives).
    pub highlighted: Vec<bool>,
    pub pose: Option<CarPose>,
    pub lanes: Vec<LaneLayer>,
}

fn bounds(scene: &Scene) -> (f64, f64, f64, f64) {
    let all = scene
        .points
        .iter()
        .chain(scene.lanes.iter().flat_map(|l| l.left.iter().chain(&l.right)))
        .chain(scene.pose.iter().map(|p| &p.position));
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    if !x0.is_finite() {
        return (0.0, 0.0, 1.0, 1.0);
    }
    (x0 - 2.0, y0 - 2.0, x1 + 2.0, y1 + 2.0)
}

/// Renders the scene with the y axis pointing up; 10 px per metre.
pub fn render_svg(scene: &Scene) -> String {
    const SCALE: f64 = 10.0;
    let (x0, y0, x1, y1) = bounds(scene);
    let (w, h) = ((x1 - x0) * SCALE, (y1 - y0) * SCALE);
    let tx = |p: Point2| ((p.x - x0) * SCALE, (y1 - p.y) * SCALE);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.1} {h:.1}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for lane in &scene.lanes {
        let poly = LanePolygon::from_boundaries(&lane.left, &lane.right);
        let pts: Vec<String> = poly
            .vertices()
            .iter()
            .map(|&p| {
                let (x, y) = tx(p);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon class="lane" points="{}" fill="{}" fill-opacity="0.35" stroke="{}" stroke-width="1"><title>{}</title></polygon>"#,
            pts.join(" "),
            lane.fill,
            lane.fill,
            lane.label
        );
    }
    for (i, &p) in scene.points.iter().enumerate() {
        let (x, y) = tx(p);
        let color = if scene.highlighted.get(i).copied().unwrap_or(false) { "#d62728" } else { "#222222" };
        let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="2.5" fill="{color}"/>"#);
    }
    if let Some(pose) = scene.pose {
        let (x, y) = tx(pose.position);
        let (hx, hy) = tx(pose.position + pose.heading * 2.0);
        let _ = writeln!(s, r##"<line x1="{x:.1}" y1="{y:.1}" x2="{hx:.1}" y2="{hy:.1}" stroke="#1f77b4" stroke-width="3"/>"##);
        let _ = writeln!(s, r##"<circle cx="{x:.1}" cy="{y:.1}" r="4" fill="#1f77b4"/>"##);
    }
    s.push_str("</svg>\n");
    s
}
