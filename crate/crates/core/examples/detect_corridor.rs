//! Detects the lane in a straight corridor with a few stray cones.

use clc::geometry::Point2;
use clc::graph::{CarPose, ConeMap, DetectionConfig};
use clc::search::clc;

fn main() -> clc::Result<()> {
    let mut pts = Vec::new();
    for i in 0..10 {
        let x = i as f64 * 4.0;
        pts.push(Point2::new(x, 1.75));
        pts.push(Point2::new(x, -1.75));
    }
    pts.extend([Point2::new(6.0, 5.0), Point2::new(14.0, -4.5), Point2::new(22.0, 0.4)]);
    let map = ConeMap::new(pts)?;
    let pose = CarPose::from_yaw(Point2::new(-0.5, 0.0), 0.0);
    let det = clc(&map, &pose, &DetectionConfig::default(), None, None)?;
    let d = &det.diagnostics;
    println!("iterations {} candidates {} complete {}", d.iterations, d.candidates, d.complete);
    let lane = det.lane.expect("corridor has a lane");
    println!("left  {:?}", lane.pair.left);
    println!("right {:?}", lane.pair.right);
    let w = lane.widths();
    println!("width {:.2}..{:.2} m", w.iter().cloned().fold(f64::INFINITY, f64::min), w.iter().cloned().fold(0.0, f64::max));
    Ok(())
}
