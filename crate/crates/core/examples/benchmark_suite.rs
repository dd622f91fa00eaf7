//! Category rates on a suite of random synthetic tracks.
//!
//! `cargo run --release --example benchmark_suite -- [seeds] [noise_sigma]`

use clc::eval::{benchmark_tracks, run_evaluation, EvalConfig};
use clc::eval::metrics::Category;

fn main() -> clc::Result<()> {
    let mut args = std::env::args().skip(1);
    let seeds = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let noise_sigma = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let tracks = benchmark_tracks(5, 200.0, 1)?;
    let cfg = EvalConfig {
        ranges: vec![30.0, 50.0],
        fp_rates: vec![0.0, 0.1, 0.3],
        noise_sigma,
        seeds,
        record_timing: true,
        hit_iou: Some(0.98),
        ..Default::default()
    };
    let t0 = std::time::Instant::now();
    let res = run_evaluation(&tracks, &cfg, None, 0)?;
    print!("{}", res.summary_text());
    let all = res.summary_where(|_| true);
    println!(
        "overall: n={} success={:.2}% critical={:.2}% mean_iou={:.3} hit500={:.1}% ({:.1?})",
        all.count,
        100.0 * all.success_rate(),
        100.0 * all.rate(Category::DivergingCritical),
        all.mean_iou,
        100.0 * all.hit_rate_500.unwrap_or(0.0),
        t0.elapsed()
    );
    Ok(())
}
