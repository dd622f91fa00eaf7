//! Generates synthetic tracks and writes them in the text track format.
//!
//! `cargo run --example generate_track -- [out_dir]`

use std::path::PathBuf;

use clc::eval::{generate_synthetic_track, save_track, CurvatureProfile, SynthParams};

fn main() -> clc::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().display().to_string()));
    let profiles = [
        ("straight", CurvatureProfile::Straight),
        ("ring", CurvatureProfile::Ring { radius: 20.0 }),
        ("chicane", CurvatureProfile::Pieces(vec![(20.0, 0.0), (15.0, 0.08), (15.0, -0.08), (30.0, 0.0)])),
        ("random", CurvatureProfile::Random { max_curvature: 1.0 / 12.0, piece_length: (10.0, 30.0) }),
    ];
    for (name, profile) in profiles {
        let t = generate_synthetic_track(&SynthParams { name: name.into(), length: 80.0, profile, seed: 7, ..Default::default() })?;
        let path = dir.join(format!("{name}.track"));
        save_track(&t, &path)?;
        println!("{}: {} cones, {} poses, closed {}", path.display(), t.cones.len(), t.poses.len(), t.gt_closed);
    }
    Ok(())
}
