//! Compares the enumeration against exhaustive search on a small map.

use std::collections::BTreeSet;

use clc::eval::brute_force_enumerate;
use clc::geometry::Point2;
use clc::graph::{construct_search_graph, find_starting_vertices, CarPose, ConeMap, DetectionConfig};
use clc::search::{epp, PathPair};

fn main() -> clc::Result<()> {
    let pts = vec![
        Point2::new(0.0, 1.6),
        Point2::new(3.2, 1.9),
        Point2::new(6.1, 2.6),
        Point2::new(9.0, 3.8),
        Point2::new(0.0, -1.7),
        Point2::new(3.4, -1.5),
        Point2::new(6.5, -0.8),
        Point2::new(9.6, 0.3),
        Point2::new(4.8, 0.2),
        Point2::new(7.5, 5.4),
    ];
    let map = ConeMap::new(pts)?;
    let pose = CarPose::from_yaw(Point2::new(-0.5, 0.0), 0.0);
    let start = find_starting_vertices(&map, &pose, 2.0)?;
    let graph = construct_search_graph(&map, 5.5);
    let cfg = DetectionConfig { it_max: u64::MAX, ..Default::default() };
    let res = epp(&graph, start, pose.heading, &cfg, None);
    let got: BTreeSet<PathPair> = res.candidates.iter().map(|c| c.pair.clone()).collect();
    let want = brute_force_enumerate(&graph, start, &cfg)?;
    println!("search: {} pairs in {} iterations; exhaustive: {} pairs", got.len(), res.iterations, want.len());
    println!("identical: {}", got == want);
    Ok(())
}
