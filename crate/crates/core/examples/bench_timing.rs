//! Detection wall time on 300-point maps with the default budget.

use std::time::Instant;

use clc::eval::{generate_synthetic_track, simulate_partial_map, CurvatureProfile, Distribution, SimConfig, SynthParams};
use clc::graph::DetectionConfig;
use clc::search::clc;

fn main() -> clc::Result<()> {
    let cfg = DetectionConfig::default();
    let mut micros = Vec::new();
    let mut seed = 0;
    while micros.len() < 40 {
        seed += 1;
        let track = generate_synthetic_track(&SynthParams {
            length: 300.0,
            profile: CurvatureProfile::Random { max_curvature: 1.0 / 12.0, piece_length: (10.0, 30.0) },
            seed,
            ..Default::default()
        })?;
        let sim = SimConfig { perception_range: 1000.0, fp_rate: 0.5, rng_seed: seed, ..Default::default() };
        let s = simulate_partial_map(&track, 0, &sim)?;
        if s.map.len() < 280 {
            continue;
        }
        let t0 = Instant::now();
        let _ = clc(&s.map, &s.pose, &cfg, None, None);
        micros.push(t0.elapsed().as_micros() as u64);
    }
    let d = Distribution::of(micros);
    println!("40 maps: median {} us, p95 {} us, max {} us", d.median, d.p95, d.max);
    Ok(())
}
