//! Draws a noisy partial map with its ground truth and the detected lane.
//!
//! `cargo run --example render_svg -- [out.svg]`

use clc::eval::{benchmark_tracks, render_svg, simulate_partial_map, LaneLayer, Scene, SimConfig};
use clc::graph::DetectionConfig;
use clc::search::clc;

fn main() -> clc::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().join("lane.svg").display().to_string());
    let track = &benchmark_tracks(1, 120.0, 6)?[0];
    let sim = SimConfig { perception_range: 40.0, fp_rate: 0.3, noise_sigma: 0.1, rng_seed: 2 };
    let s = simulate_partial_map(track, 3, &sim)?;
    let det = clc(&s.map, &s.pose, &DetectionConfig::default(), None, None)?;
    let (gl, gr) = s.gt.points(s.map.points());
    let mut lanes = vec![LaneLayer { left: gl, right: gr, fill: "#9c9".into(), label: "ground truth".into() }];
    if let Some(lane) = &det.lane {
        let (l, r) = lane.boundaries(s.map.points());
        lanes.push(LaneLayer { left: l, right: r, fill: "#69c".into(), label: "detected".into() });
    }
    let scene = Scene { points: s.map.points().to_vec(), highlighted: s.false_positive.clone(), pose: Some(s.pose), lanes };
    std::fs::write(&out, render_svg(&scene))?;
    println!("wrote {out}");
    Ok(())
}
