//! Command-line front end.
//!
//! Settings are layered: built-in defaults, then a TOML config file
//! (`--config`, or the `CLC_CONFIG` environment variable), then flags.
//! Exit codes: 0 success, 1 error, 2 no lane found.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::eval::{
    self, benchmark_tracks, generate_synthetic_track, length_ordered_pairs, load_map, load_track, ranking_pairs,
    render_svg, run_evaluation, save_track, simulate_partial_map, CurvatureProfile, DatasetConfig, EvalConfig,
    LaneLayer, Scene, SimConfig, SynthParams, TrackRecord,
};
use crate::geometry::Point2;
use crate::graph::{CarPose, DetectionConfig};
use crate::ranker::{
    load_pairs, load_weights, pairwise_accuracy, save_pairs, save_weights, train_with_log, RankTrainConfig,
    RankerWeights, WeightsMeta,
};
use crate::search::{clc, Detection, Seed};

/// Version of the JSON documents printed by `detect` and `bench`.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_LANE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "clc", version, about = "Lane detection on 2D cone maps")]
pub struct Cli {
    /// TOML file with [detection], [sim], [train], [eval] and [dataset] tables.
    #[arg(long, global = true, env = "CLC_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Detect the lane in a map file and print it as JSON.
    Detect(DetectArgs),
    /// Write the partial maps a car would see from the poses of a track.
    Simulate(SimulateArgs),
    /// Write synthetic tracks.
    Generate(GenerateArgs),
    /// Build a ranker training set from simulated detections.
    Pairs(PairsArgs),
    /// Train ranker weights from a pair file.
    Train(TrainArgs),
    /// Simulate, detect and score every pose of a set of tracks.
    Evaluate(EvaluateArgs),
    /// Time repeated detections on map files.
    Bench(BenchArgs),
    /// Draw a map, its ground truth and optionally the detected lane as SVG.
    Render(RenderArgs),
}

#[derive(Args, Debug, Default, Clone)]
pub struct DetectionFlags {
    /// Maximum cone distance for graph edges (m) [default: 5.5]
    #[arg(long)]
    pub d_max: Option<f64>,
    /// Maximum turn angle between boundary segments (rad) [default: pi/2]
    #[arg(long)]
    pub theta_max: Option<f64>,
    /// Minimum lane width (m) [default: 2.5]
    #[arg(long)]
    pub w_min: Option<f64>,
    /// Maximum lane width (m) [default: 6.5]
    #[arg(long)]
    pub w_max: Option<f64>,
    /// Enumeration budget [default: 2000]
    #[arg(long)]
    pub it_max: Option<u64>,
    /// Start-cone search radius (m) [default: 2]
    #[arg(long)]
    pub start_radius: Option<f64>,
    /// Raw candidate cap before reduction to maximal pairs [default: 500000]
    #[arg(long)]
    pub max_candidates: Option<usize>,
    /// Vertices dropped from the far end of a warmstart [default: 2]
    #[arg(long)]
    pub warmstart_trim: Option<usize>,
}

impl DetectionFlags {
    fn apply(&self, c: &mut DetectionConfig) {
        set(&mut c.d_max, self.d_max);
        set(&mut c.theta_max, self.theta_max);
        set(&mut c.w_min, self.w_min);
        set(&mut c.w_max, self.w_max);
        set(&mut c.it_max, self.it_max);
        set(&mut c.start_radius, self.start_radius);
        set(&mut c.max_candidates, self.max_candidates);
        set(&mut c.warmstart_trim, self.warmstart_trim);
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct SimFlags {
    /// Perception half-disc radius (m) [default: 30]
    #[arg(long)]
    pub perception_range: Option<f64>,
    /// Fraction of false positives in the output [default: 0]
    #[arg(long)]
    pub fp_rate: Option<f64>,
    /// Cone position noise (m) [default: 0]
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Simulation seed [default: 0]
    #[arg(long, alias = "seed")]
    pub rng_seed: Option<u64>,
}

impl SimFlags {
    fn apply(&self, c: &mut SimConfig) {
        set(&mut c.perception_range, self.perception_range);
        set(&mut c.fp_rate, self.fp_rate);
        set(&mut c.noise_sigma, self.noise_sigma);
        set(&mut c.rng_seed, self.rng_seed);
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct TrainFlags {
    /// [default: 200]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// [default: 8192]
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// [default: 0.008]
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// IoU sharpness of the pair targets [default: 100]
    #[arg(long)]
    pub lambda_iou: Option<f64>,
    /// Initialization and shuffling seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// Map file (track format; ground truth optional).
    #[arg(long)]
    pub map: PathBuf,
    /// Pose from the file to detect from.
    #[arg(long, default_value_t = 0, conflicts_with = "pose")]
    pub pose_index: usize,
    /// Explicit pose as `x,y,yaw`.
    #[arg(long, value_parser = parse_pose, allow_hyphen_values = true)]
    pub pose: Option<CarPose>,
    /// Ranker weights; without them the longest candidate wins.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Previous `detect` output used as warmstart.
    #[arg(long)]
    pub warmstart: Option<PathBuf>,
    /// Also write an SVG picture here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Report zero wall time so output is reproducible.
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub detection: DetectionFlags,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub track: PathBuf,
    /// Only this pose; otherwise every pose.
    #[arg(long)]
    pub pose_index: Option<usize>,
    /// Output file (single pose) or directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub sim: SimFlags,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileKind {
    Straight,
    Ring,
    Random,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Output file, or directory with `--suite`.
    #[arg(long)]
    pub out: PathBuf,
    /// Write this many random benchmark tracks instead of one track.
    #[arg(long)]
    pub suite: Option<usize>,
    #[arg(long, value_enum, default_value_t = ProfileKind::Random)]
    pub profile: ProfileKind,
    #[arg(long, default_value = "synthetic")]
    pub name: String,
    #[arg(long, default_value_t = 150.0)]
    pub length: f64,
    #[arg(long, default_value_t = 3.5)]
    pub lane_width: f64,
    #[arg(long, default_value_t = 4.0)]
    pub cone_spacing: f64,
    /// Centerline radius of a ring (m).
    #[arg(long, default_value_t = 15.0)]
    pub radius: f64,
    /// Largest curvature of random profiles (1/m).
    #[arg(long, default_value_t = 1.0 / 12.0)]
    pub max_curvature: f64,
    #[arg(long, default_value_t = 5.0)]
    pub pose_spacing: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PairKind {
    /// Targets from the IoU of both candidates against the ground truth.
    Iou,
    /// Targets from lane length only.
    Length,
}

#[derive(Args, Debug)]
pub struct PairsArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub tracks: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = PairKind::Iou)]
    pub kind: PairKind,
    /// Candidates sampled per instance [default: 8]
    #[arg(long)]
    pub candidates_per_instance: Option<usize>,
    /// Runs per track and setting [default: 1]
    #[arg(long)]
    pub seeds: Option<u32>,
    #[arg(long)]
    pub global_seed: Option<u64>,
    #[command(flatten)]
    pub detection: DetectionFlags,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub pairs: PathBuf,
    /// Weights output; the JSON sidecar goes next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Print the loss every this many epochs.
    #[arg(long, default_value_t = 1)]
    pub log_every: usize,
    #[command(flatten)]
    pub train: TrainFlags,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub tracks: Vec<PathBuf>,
    /// Results CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Human-readable summary; printed to stdout when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Perception ranges, comma separated [default: 30,50]
    #[arg(long, value_delimiter = ',')]
    pub ranges: Option<Vec<f64>>,
    /// False-positive rates, comma separated [default: 0,0.1,0.3,0.5]
    #[arg(long, value_delimiter = ',')]
    pub fp_rates: Option<Vec<f64>>,
    /// [default: 0]
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Runs per track and setting [default: 5]
    #[arg(long)]
    pub seeds: Option<u32>,
    /// [default: 0]
    #[arg(long, alias = "seed")]
    pub global_seed: Option<u64>,
    /// Disable warmstart chaining across poses.
    #[arg(long)]
    pub no_warmstart: bool,
    /// Write wall times into the CSV (makes it run dependent).
    #[arg(long)]
    pub record_timing: bool,
    #[command(flatten)]
    pub detection: DetectionFlags,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub maps: Vec<PathBuf>,
    /// Detections per map and pose.
    #[arg(long, default_value_t = 10)]
    pub repeat: usize,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[command(flatten)]
    pub detection: DetectionFlags,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub pose_index: usize,
    /// Run detection and draw the chosen lane.
    #[arg(long)]
    pub detect: bool,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub detection: DetectionFlags,
}

/// Prints to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn parse_pose(s: &str) -> std::result::Result<CarPose, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("invalid number '{t}'")))
        .collect::<std::result::Result<_, _>>()?;
    match v.as_slice() {
        [x, y, yaw] if v.iter().all(|a| a.is_finite()) => Ok(CarPose::from_yaw(Point2::new(*x, *y), *yaw)),
        _ => Err("pose must be x,y,yaw".into()),
    }
}

/// Contents of a config file; every table is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub detection: DetectionConfig,
    pub sim: SimConfig,
    pub train: RankTrainConfig,
    /// The `detection` table of `eval` is ignored; `[detection]` applies.
    pub eval: EvalConfig,
    pub dataset: DatasetConfig,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

fn weights_opt(path: Option<&Path>) -> Result<Option<RankerWeights>> {
    path.map(|p| load_weights(p).map(|(w, _)| w)).transpose()
}

fn pose_of(track: &TrackRecord, index: usize) -> Result<CarPose> {
    track
        .poses
        .get(index)
        .copied()
        .ok_or_else(|| Error::Config(format!("pose index {index} out of range ({} poses)", track.poses.len())))
}

fn pts_json(pts: &[Point2]) -> serde_json::Value {
    json!(pts.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>())
}

/// The JSON document printed by `detect`.
pub fn detection_json(det: &Detection, points: &[Point2], timing: bool) -> serde_json::Value {
    let mut diag = serde_json::to_value(&det.diagnostics).expect("diagnostics serialize");
    if !timing {
        diag["micros"] = json!(0);
    }
    let lane = det.lane.as_ref().map(|c| {
        let l: Vec<Point2> = c.pair.left.iter().map(|&v| points[v]).collect();
        let r: Vec<Point2> = c.pair.right.iter().map(|&v| points[v]).collect();
        let (bl, br) = c.boundaries(points);
        let length = eval::metrics::lane_length(&bl, &br);
        json!({
            "left": c.pair.left,
            "right": c.pair.right,
            "closed": c.closed,
            "left_points": pts_json(&l),
            "right_points": pts_json(&r),
            "length": length,
        })
    });
    json!({ "schema": "clc.detect", "version": SCHEMA_VERSION, "lane": lane, "diagnostics": diag })
}

fn seed_from_json(path: &Path) -> Result<Seed> {
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let side = |k: &str| -> Result<Vec<Point2>> {
        let arr = v["lane"][k]
            .as_array()
            .ok_or_else(|| Error::Config(format!("{}: warmstart has no lane.{k}", path.display())))?;
        arr.iter()
            .map(|p| match (p[0].as_f64(), p[1].as_f64()) {
                (Some(x), Some(y)) => Ok(Point2::new(x, y)),
                _ => Err(Error::Config(format!("{}: malformed point in lane.{k}", path.display()))),
            })
            .collect()
    };
    Ok(Seed { left: side("left_points")?, right: side("right_points")? })
}

fn scene_for(track: &TrackRecord, pose: CarPose, det: Option<&Detection>) -> Scene {
    let pts = track.cones.points();
    let mut lanes = Vec::new();
    if !track.gt_left.is_empty() && !track.gt_right.is_empty() {
        let (mut l, mut r) = track.gt_points();
        if track.gt_closed {
            l.push(l[0]);
            r.push(r[0]);
        }
        lanes.push(LaneLayer { left: l, right: r, fill: "#2ca02c".into(), label: "ground truth".into() });
    }
    if let Some(c) = det.and_then(|d| d.lane.as_ref()) {
        let (l, r) = c.boundaries(pts);
        lanes.push(LaneLayer { left: l, right: r, fill: "#1f77b4".into(), label: "detected".into() });
    }
    Scene { points: pts.to_vec(), highlighted: Vec::new(), pose: Some(pose), lanes }
}

fn cmd_detect(a: &DetectArgs, file: &FileConfig) -> Result<i32> {
    let mut cfg = file.detection.clone();
    a.detection.apply(&mut cfg);
    let track = load_map(&a.map)?;
    if track.cones.is_empty() {
        return Err(Error::NoStartFound { radius: 2.0 * cfg.start_radius });
    }
    let pose = match a.pose {
        Some(p) => p,
        None => pose_of(&track, a.pose_index)?,
    };
    let weights = weights_opt(a.weights.as_deref())?;
    let warm = a.warmstart.as_deref().map(seed_from_json).transpose()?;
    let det = clc(&track.cones, &pose, &cfg, warm.as_ref(), weights.as_ref())?;
    let doc = detection_json(&det, track.cones.points(), !a.no_timing);
    emit(&serde_json::to_string_pretty(&doc)?)?;
    if let Some(svg) = &a.svg {
        fs::write(svg, render_svg(&scene_for(&track, pose, Some(&det))))?;
    }
    Ok(if det.lane.is_some() { EXIT_OK } else { EXIT_NO_LANE })
}

fn cmd_simulate(a: &SimulateArgs, file: &FileConfig) -> Result<i32> {
    let mut cfg = file.sim.clone();
    a.sim.apply(&mut cfg);
    let track = load_track(&a.track)?;
    let write = |i: usize, path: &Path| -> Result<()> {
        let s = simulate_partial_map(&track, i, &cfg)?;
        let rec = TrackRecord {
            name: format!("{}@{i}", track.name),
            cones: s.map,
            poses: vec![s.pose],
            gt_left: s.gt.left,
            gt_right: s.gt.right,
            gt_closed: s.gt.closed,
        };
        save_track(&rec, path)
    };
    match a.pose_index {
        Some(i) => write(i, &a.out)?,
        None => {
            fs::create_dir_all(&a.out)?;
            for i in 0..track.poses.len() {
                write(i, &a.out.join(format!("{}_{i:03}.track", track.name)))?;
            }
            eprintln!("wrote {} partial maps to {}", track.poses.len(), a.out.display());
        }
    }
    Ok(EXIT_OK)
}

fn cmd_generate(a: &GenerateArgs) -> Result<i32> {
    if let Some(n) = a.suite {
        fs::create_dir_all(&a.out)?;
        for t in benchmark_tracks(n, a.length, a.seed)? {
            save_track(&t, &a.out.join(format!("{}.track", t.name)))?;
        }
        eprintln!("wrote {n} tracks to {}", a.out.display());
        return Ok(EXIT_OK);
    }
    let profile = match a.profile {
        ProfileKind::Straight => CurvatureProfile::Straight,
        ProfileKind::Ring => CurvatureProfile::Ring { radius: a.radius },
        ProfileKind::Random => CurvatureProfile::Random { max_curvature: a.max_curvature, piece_length: (10.0, 30.0) },
    };
    let t = generate_synthetic_track(&SynthParams {
        name: a.name.clone(),
        length: a.length,
        lane_width: a.lane_width,
        cone_spacing: a.cone_spacing,
        profile,
        pose_spacing: a.pose_spacing,
        seed: a.seed,
    })?;
    save_track(&t, &a.out)?;
    eprintln!("{}: {} cones, {} poses", a.out.display(), t.cones.len(), t.poses.len());
    Ok(EXIT_OK)
}

fn cmd_pairs(a: &PairsArgs, file: &FileConfig) -> Result<i32> {
    let mut cfg = file.dataset.clone();
    cfg.detection = file.detection.clone();
    a.detection.apply(&mut cfg.detection);
    set(&mut cfg.candidates_per_instance, a.candidates_per_instance);
    set(&mut cfg.seeds, a.seeds);
    set(&mut cfg.global_seed, a.global_seed);
    let tracks = a.tracks.iter().map(|p| load_track(p)).collect::<Result<Vec<_>>>()?;
    let pairs = match a.kind {
        PairKind::Iou => ranking_pairs(&tracks, &cfg)?,
        PairKind::Length => length_ordered_pairs(&tracks, &cfg)?,
    };
    save_pairs(&a.out, &pairs)?;
    eprintln!("wrote {} pairs to {}", pairs.len(), a.out.display());
    Ok(EXIT_OK)
}

fn cmd_train(a: &TrainArgs, file: &FileConfig) -> Result<i32> {
    let mut cfg = file.train.clone();
    let f = &a.train;
    set(&mut cfg.epochs, f.epochs);
    set(&mut cfg.batch_size, f.batch_size);
    set(&mut cfg.learning_rate, f.learning_rate);
    set(&mut cfg.lambda_iou, f.lambda_iou);
    set(&mut cfg.seed, f.seed);
    let pairs = load_pairs(&a.pairs)?;
    let every = a.log_every.max(1);
    let report = train_with_log(&pairs, &cfg, |epoch, loss| {
        if (epoch + 1) % every == 0 {
            eprintln!("epoch {:>4} loss {loss:.6}", epoch + 1);
        }
    })?;
    let final_loss = report.losses.last().copied();
    save_weights(&a.out, &report.weights, &WeightsMeta::for_weights(&report.weights, Some(cfg), final_loss))?;
    emit(&format!(
        "final loss {:.6} pairwise accuracy {:.4} ({} pairs) -> {}",
        final_loss.unwrap_or(f64::NAN),
        pairwise_accuracy(&report.weights, &pairs),
        pairs.len(),
        a.out.display()
    ))?;
    Ok(EXIT_OK)
}

fn cmd_evaluate(a: &EvaluateArgs, file: &FileConfig) -> Result<i32> {
    let mut cfg = file.eval.clone();
    cfg.detection = file.detection.clone();
    a.detection.apply(&mut cfg.detection);
    set(&mut cfg.ranges, a.ranges.clone());
    set(&mut cfg.fp_rates, a.fp_rates.clone());
    set(&mut cfg.noise_sigma, a.noise_sigma);
    set(&mut cfg.seeds, a.seeds);
    set(&mut cfg.global_seed, a.global_seed);
    if a.no_warmstart {
        cfg.warmstart = false;
    }
    if a.record_timing {
        cfg.record_timing = true;
    }
    let tracks = a.tracks.iter().map(|p| load_track(p)).collect::<Result<Vec<_>>>()?;
    let weights = weights_opt(a.weights.as_deref())?;
    let res = run_evaluation(&tracks, &cfg, weights.as_ref(), a.jobs)?;
    res.write_csv(fs::File::create(&a.out)?)?;
    let summary = res.summary_text();
    match &a.summary {
        Some(p) => fs::write(p, &summary)?,
        None => emit(summary.trim_end())?,
    }
    Ok(EXIT_OK)
}

fn cmd_bench(a: &BenchArgs, file: &FileConfig) -> Result<i32> {
    let mut cfg = file.detection.clone();
    a.detection.apply(&mut cfg);
    let weights = weights_opt(a.weights.as_deref())?;
    let mut micros = Vec::new();
    let mut per_map = Vec::new();
    for path in &a.maps {
        let track = load_map(path)?;
        let mut local = Vec::new();
        for pose in &track.poses {
            for _ in 0..a.repeat.max(1) {
                let t0 = Instant::now();
                let det = clc(&track.cones, pose, &cfg, None, weights.as_ref());
                local.push(t0.elapsed().as_micros() as u64);
                det?;
            }
        }
        per_map.push(json!({
            "map": path.display().to_string(),
            "points": track.cones.len(),
            "micros": eval::run::Distribution::of(local.clone()),
        }));
        micros.extend(local);
    }
    let doc = json!({
        "schema": "clc.bench",
        "version": SCHEMA_VERSION,
        "it_max": cfg.it_max,
        "runs": micros.len(),
        "micros": eval::run::Distribution::of(micros),
        "maps": per_map,
    });
    emit(&serde_json::to_string_pretty(&doc)?)?;
    Ok(EXIT_OK)
}

fn cmd_render(a: &RenderArgs, file: &FileConfig) -> Result<i32> {
    let mut cfg = file.detection.clone();
    a.detection.apply(&mut cfg);
    let track = load_map(&a.map)?;
    let pose = pose_of(&track, a.pose_index)?;
    let det = if a.detect {
        let weights = weights_opt(a.weights.as_deref())?;
        Some(clc(&track.cones, &pose, &cfg, None, weights.as_ref())?)
    } else {
        None
    };
    fs::write(&a.out, render_svg(&scene_for(&track, pose, det.as_ref())))?;
    Ok(EXIT_OK)
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Detect(a) => cmd_detect(a, &file),
        Command::Simulate(a) => cmd_simulate(a, &file),
        Command::Generate(a) => cmd_generate(a),
        Command::Pairs(a) => cmd_pairs(a, &file),
        Command::Train(a) => cmd_train(a, &file),
        Command::Evaluate(a) => cmd_evaluate(a, &file),
        Command::Bench(a) => cmd_bench(a, &file),
        Command::Render(a) => cmd_render(a, &file),
    }
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
