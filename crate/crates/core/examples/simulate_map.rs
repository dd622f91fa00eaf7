//! Partial maps as seen from one pose at increasing false-positive rates.

use clc::eval::{benchmark_tracks, simulate_partial_map, SimConfig};

fn main() -> clc::Result<()> {
    let track = &benchmark_tracks(1, 150.0, 2)?[0];
    for fp_rate in [0.0, 0.1, 0.3, 0.5] {
        let sim = SimConfig { perception_range: 30.0, fp_rate, noise_sigma: 0.1, rng_seed: 1 };
        let s = simulate_partial_map(track, 4, &sim)?;
        println!(
            "fp {fp_rate:.1}: {:3} points, {:3} false, visible gt {}+{}",
            s.map.len(),
            s.fp_count(),
            s.gt.left.len(),
            s.gt.right.len()
        );
    }
    Ok(())
}
