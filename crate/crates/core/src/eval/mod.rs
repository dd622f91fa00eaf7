//! Evaluation: track files, synthetic tracks, partial-map simulation,
//! prediction metrics, the brute-force oracle and batch runs.

pub mod dataset;
pub mod metrics;
pub mod oracle;
pub mod render;
pub mod run;
pub mod sim;
pub mod synth;
pub mod track;

pub use dataset::{length_ordered_pairs, ranking_pairs, DatasetConfig};
pub use metrics::{classify_prediction, divergence, Category, LaneRegion, PredictionReport};
pub use oracle::{brute_force_enumerate, reference_cd, ORACLE_VERTEX_LIMIT};
pub use render::{render_svg, LaneLayer, Scene};
pub use run::{run_evaluation, Distribution, EvalConfig, EvalResults, GroupSummary, InstanceResult};
pub use sim::{simulate_partial_map, SimConfig, SimulatedMap, VisibleGt};
pub use synth::{benchmark_tracks, generate_synthetic_track, CurvatureProfile, SynthParams};
pub use track::{load_map, load_track, save_track, TrackRecord};

/// Combines seed components with splitmix64 so that every instance gets an
/// independent stream.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut h = 0x9e37_79b9_7f4a_7c15u64;
    for &p in parts {
        h = splitmix(h ^ p);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
