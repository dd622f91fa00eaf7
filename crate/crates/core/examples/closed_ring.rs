//! Detection on a complete map of a circular track returns a closed lane.

use clc::eval::{generate_synthetic_track, CurvatureProfile, SynthParams};
use clc::graph::DetectionConfig;
use clc::search::clc;

fn main() -> clc::Result<()> {
    let track = generate_synthetic_track(&SynthParams {
        name: "ring".into(),
        profile: CurvatureProfile::Ring { radius: 15.0 },
        ..Default::default()
    })?;
    // The whole map, as a finished mapping lap would provide it.
    let det = clc(&track.cones, &track.poses[0], &DetectionConfig::default(), None, None)?;
    let lane = det.lane.expect("ring lane");
    println!(
        "{} cones, closed {}, {} + {} vertices, {} candidates",
        track.cones.len(),
        lane.closed,
        lane.pair.left.len(),
        lane.pair.right.len(),
        det.diagnostics.candidates
    );
    Ok(())
}
