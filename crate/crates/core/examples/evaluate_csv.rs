//! Runs a small evaluation with the bundled ranker and prints the CSV head.

use std::path::Path;

use clc::eval::{benchmark_tracks, run_evaluation, EvalConfig};
use clc::ranker::load_weights;

fn main() -> clc::Result<()> {
    let weights = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/ranker.bin");
    let (w, meta) = load_weights(&weights)?;
    println!("ranker trained with {:?}", meta.train.map(|t| (t.epochs, t.batch_size)));
    let tracks = benchmark_tracks(2, 100.0, 4)?;
    let cfg = EvalConfig { fp_rates: vec![0.1, 0.3], seeds: 2, noise_sigma: 0.25, ..Default::default() };
    let res = run_evaluation(&tracks, &cfg, Some(&w), 0)?;
    for line in res.to_csv_string().lines().take(6) {
        println!("{line}");
    }
    print!("{}", res.summary_text());
    Ok(())
}
