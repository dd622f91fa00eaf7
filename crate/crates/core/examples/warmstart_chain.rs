//! Drives along a track and seeds every detection with the previous lane.

use clc::eval::{generate_synthetic_track, simulate_partial_map, CurvatureProfile, SimConfig, SynthParams};
use clc::graph::DetectionConfig;
use clc::search::{clc, Seed};

fn main() -> clc::Result<()> {
    let track = generate_synthetic_track(&SynthParams {
        length: 150.0,
        profile: CurvatureProfile::Random { max_curvature: 1.0 / 12.0, piece_length: (10.0, 30.0) },
        seed: 11,
        ..Default::default()
    })?;
    let cfg = DetectionConfig::default();
    let mut seed: Option<Seed> = None;
    println!("pose  cold_it  warm_it  vertices");
    for i in 0..track.poses.len() {
        let sim = SimConfig { perception_range: 30.0, fp_rate: 0.2, rng_seed: i as u64, ..Default::default() };
        let s = simulate_partial_map(&track, i, &sim)?;
        let cold = clc(&s.map, &s.pose, &cfg, None, None)?;
        let warm = clc(&s.map, &s.pose, &cfg, seed.as_ref(), None)?;
        let n = warm.lane.as_ref().map_or(0, |c| c.pair.len());
        println!("{i:4}  {:7}  {:7}  {n:8}", cold.diagnostics.iterations, warm.diagnostics.iterations);
        seed = warm.lane.as_ref().map(|c| Seed::from_candidate(c, s.map.points()));
    }
    Ok(())
}
