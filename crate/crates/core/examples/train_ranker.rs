//! Builds IoU-labelled candidate pairs and trains the scoring network.
//!
//! `cargo run --release --example train_ranker -- [epochs]`

use clc::eval::{benchmark_tracks, ranking_pairs, DatasetConfig};
use clc::ranker::{pairwise_accuracy, train_with_log, RankTrainConfig};

fn main() -> clc::Result<()> {
    let epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let tracks = benchmark_tracks(2, 100.0, 21)?;
    let pairs = ranking_pairs(&tracks, &DatasetConfig { candidates_per_instance: 6, ..Default::default() })?;
    let (train_set, test_set) = pairs.split_at(pairs.len() * 4 / 5);
    println!("{} training pairs, {} held out", train_set.len(), test_set.len());
    let cfg = RankTrainConfig { epochs, ..Default::default() };
    let rep = train_with_log(train_set, &cfg, |e, loss| {
        if e % 10 == 0 {
            println!("epoch {e:4} loss {loss:.4}");
        }
    })?;
    println!(
        "accuracy train {:.4} held-out {:.4}",
        pairwise_accuracy(&rep.weights, train_set),
        pairwise_accuracy(&rep.weights, test_set)
    );
    Ok(())
}
