#![allow(dead_code)]

use clc::geometry::Point2;
use clc::graph::{construct_search_graph, find_starting_vertices_widening, CarPose, ConeMap, DetectionConfig, SearchGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small random lane-like instance: two noisy cone rows plus clutter, at most
/// 12 points, with a pose between the first cones.
pub struct SmallInstance {
    pub graph: SearchGraph,
    pub start: (usize, usize),
    pub pose: CarPose,
}

pub fn small_instance(seed: u64) -> Option<SmallInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_left = rng.random_range(2..=5);
    let n_right = rng.random_range(2..=5);
    let n_fp = rng.random_range(0..=(12 - n_left - n_right).min(3));
    let width = rng.random_range(2.8..5.5);
    let spacing = rng.random_range(2.5..4.5);
    let bend = rng.random_range(-0.25..0.25);
    let noise = rng.random_range(0.0..0.8);
    let mut pts = Vec::new();
    let mut row = |offset: f64, n: usize, rng: &mut ChaCha8Rng| {
        for i in 0..n {
            let s = i as f64 * spacing;
            let heading = bend * s / spacing;
            let c = Point2::new(s * (heading * 0.5).cos(), s * (heading * 0.5).sin());
            let normal = Point2::new(-heading.sin(), heading.cos());
            let jitter = Point2::new(rng.random_range(-noise..=noise), rng.random_range(-noise..=noise));
            pts.push(c + normal * offset + jitter);
        }
    };
    row(width / 2.0, n_left, &mut rng);
    row(-width / 2.0, n_right, &mut rng);
    let xmax = spacing * n_left.max(n_right) as f64;
    for _ in 0..n_fp {
        pts.push(Point2::new(rng.random_range(-1.0..xmax), rng.random_range(-width..width)));
    }
    let map = ConeMap::new(pts).ok()?;
    let pose = CarPose::from_yaw(Point2::new(-0.5, 0.0), 0.0);
    let start = find_starting_vertices_widening(&map, &pose, 2.0).ok()?;
    let graph = construct_search_graph(&map, DetectionConfig::default().d_max);
    Some(SmallInstance { graph, start, pose })
}
