//! Cone maps, car poses, the distance graph over cones and start selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeometryError, Point2};

/// Points closer than this are merged when a map is built.
pub const DUPLICATE_THRESHOLD: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeColor {
    Left,
    Right,
    Unknown,
}

impl ConeColor {
    pub fn as_str(self) -> &'static str {
        match self {
            ConeColor::Left => "left",
            ConeColor::Right => "right",
            ConeColor::Unknown => "unknown",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "left" => Some(ConeColor::Left),
            "right" => Some(ConeColor::Right),
            "unknown" => Some(ConeColor::Unknown),
            _ => None,
        }
    }
}

/// Landmark map. Colors are carried along for I/O and rendering only.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeMap {
    points: Vec<Point2>,
    colors: Vec<ConeColor>,
}

impl ConeMap {
    /// Builds a map from raw points, merging points within 1 cm of an earlier one.
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        let colors = vec![ConeColor::Unknown; points.len()];
        Ok(Self::with_colors(points, colors)?.0)
    }

    /// Like [`ConeMap::new`], returning for every input point the index it was merged into.
    pub fn with_colors(points: Vec<Point2>, colors: Vec<ConeColor>) -> Result<(Self, Vec<usize>)> {
        if points.len() != colors.len() {
            return Err(Error::Config(format!(
                "{} points but {} colors",
                points.len(),
                colors.len()
            )));
        }
        let mut kept: Vec<Point2> = Vec::with_capacity(points.len());
        let mut kept_colors = Vec::with_capacity(points.len());
        let mut mapping = Vec::with_capacity(points.len());
        for (p, c) in points.into_iter().zip(colors) {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite { x: p.x, y: p.y }.into());
            }
            match kept.iter().position(|q| q.dist(p) < DUPLICATE_THRESHOLD) {
                Some(i) => mapping.push(i),
                None => {
                    mapping.push(kept.len());
                    kept.push(p);
                    kept_colors.push(c);
                }
            }
        }
        Ok((ConeMap { points: kept, colors: kept_colors }, mapping))
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn colors(&self) -> &[ConeColor] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarPose {
    pub position: Point2,
    /// Unit heading vector.
    pub heading: Point2,
}

impl CarPose {
    pub fn from_yaw(position: Point2, yaw: f64) -> Self {
        CarPose { position, heading: Point2::new(yaw.cos(), yaw.sin()) }
    }

    /// Normalizes `heading`; fails on a zero or non-finite vector.
    pub fn new(position: Point2, heading: Point2) -> Result<Self> {
        let n = heading.norm();
        if !(n.is_finite() && n > 0.0) || !position.is_finite() {
            return Err(Error::Config("car heading must be a nonzero finite vector".into()));
        }
        Ok(CarPose { position, heading: heading * (1.0 / n) })
    }

    pub fn yaw(&self) -> f64 {
        self.heading.y.atan2(self.heading.x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionConfig {
    /// Maximum edge length of the search graph (m).
    pub d_max: f64,
    /// Turn angles must stay strictly below this (rad).
    pub theta_max: f64,
    /// Lane widths must lie strictly within `(w_min, w_max)` (m).
    pub w_min: f64,
    pub w_max: f64,
    /// Enumeration loop budget.
    pub it_max: u64,
    /// Radius around the car for start vertices (m); doubled once if nothing is found.
    pub start_radius: f64,
    /// Above this many raw candidates only maximal ones are kept.
    pub max_candidates: usize,
    /// Vertices dropped from the far end of each warmstart boundary before
    /// the seeded search starts.
    pub warmstart_trim: usize,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            d_max: 5.5,
            theta_max: std::f64::consts::FRAC_PI_2,
            w_min: 2.5,
            w_max: 6.5,
            it_max: 2000,
            start_radius: 2.0,
            max_candidates: 500_000,
            warmstart_trim: 2,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.d_max > 0.0
            && self.theta_max > 0.0
            && self.theta_max <= std::f64::consts::PI
            && self.w_min > 0.0
            && self.w_min < self.w_max
            && self.it_max >= 1
            && self.start_radius > 0.0
            && self.max_candidates >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid detection config {self:?}")))
        }
    }
}

/// Undirected distance graph over map indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchGraph {
    adjacency: Vec<Vec<usize>>,
    points: Vec<Point2>,
}

impl SearchGraph {
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn point(&self, v: usize) -> Point2 {
        self.points[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Graph with explicit edges, for tests and oracles.
    pub fn from_edges(points: Vec<Point2>, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); points.len()];
        for &(a, b) in edges {
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
        }
        SearchGraph { adjacency, points }
    }
}

/// Connects every pair of cones at distance at most `d_max`.
pub fn construct_search_graph(map: &ConeMap, d_max: f64) -> SearchGraph {
    let pts = map.points();
    let mut adjacency = vec![Vec::new(); pts.len()];
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i].dist(pts[j]) <= d_max {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    for adj in &mut adjacency {
        adj.sort_unstable();
    }
    SearchGraph { adjacency, points: pts.to_vec() }
}

/// Left/right start cones: within `radius`, strictly left and strictly right of
/// the heading line, minimizing
/// `|d_l - d_r| + 1 m/rad · ||α_l| - |α_r||` (ties to the smaller index pair).
pub fn find_starting_vertices(map: &ConeMap, pose: &CarPose, radius: f64) -> Result<(usize, usize)> {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (i, &p) in map.points().iter().enumerate() {
        let d = p - pose.position;
        let dist = d.norm();
        if dist > radius {
            continue;
        }
        let cross = pose.heading.cross(d);
        let angle = cross.atan2(pose.heading.dot(d));
        if cross > 0.0 {
            left.push((i, dist, angle.abs()));
        } else if cross < 0.0 {
            right.push((i, dist, angle.abs()));
        }
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for &(l, dl, al) in &left {
        for &(r, dr, ar) in &right {
            let score = (dl - dr).abs() + (al - ar).abs();
            let better = match best {
                None => true,
                Some((s, bl, br)) => score < s || (score == s && (l, r) < (bl, br)),
            };
            if better {
                best = Some((score, l, r));
            }
        }
    }
    best.map(|(_, l, r)| (l, r)).ok_or(Error::NoStartFound { radius })
}

/// Tries `radius`, then twice `radius`.
pub fn find_starting_vertices_widening(map: &ConeMap, pose: &CarPose, radius: f64) -> Result<(usize, usize)> {
    find_starting_vertices(map, pose, radius).or_else(|_| find_starting_vertices(map, pose, 2.0 * radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map(pts: &[(f64, f64)]) -> ConeMap {
        ConeMap::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
    }

    fn origin() -> CarPose {
        CarPose::from_yaw(Point2::new(0.0, 0.0), 0.0)
    }

    #[test]
    fn edge_threshold() {
        let g = construct_search_graph(&map(&[(0.0, 0.0), (5.6, 0.0)]), 5.5);
        assert_eq!(g.edge_count(), 0);
        let g = construct_search_graph(&map(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]), 5.5);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn duplicates_merge() {
        let (m, mapping) = ConeMap::with_colors(
            vec![Point2::new(0.0, 0.0), Point2::new(0.005, 0.0), Point2::new(1.0, 0.0)],
            vec![ConeColor::Left; 3],
        )
        .unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(mapping, vec![0, 0, 1]);
    }

    #[test]
    fn start_pairs() {
        let m = map(&[(0.5, 1.5), (0.5, -1.5)]);
        assert_eq!(find_starting_vertices(&m, &origin(), 2.0).unwrap(), (0, 1));

        let m = map(&[(1.0, 1.0)]);
        assert!(matches!(find_starting_vertices(&m, &origin(), 2.0), Err(Error::NoStartFound { .. })));

        let m = map(&[(0.5, 1.5), (1.0, 1.8), (0.5, -1.5)]);
        assert_eq!(find_starting_vertices(&m, &origin(), 2.5).unwrap(), (0, 2));
    }

    #[test]
    fn dead_ahead_is_neither_side() {
        let m = map(&[(1.0, 0.0), (0.5, -1.0)]);
        assert!(find_starting_vertices(&m, &origin(), 2.0).is_err());
    }

    #[test]
    fn widening_retries_once() {
        let m = map(&[(0.5, 3.0), (0.5, -3.0)]);
        assert!(find_starting_vertices(&m, &origin(), 2.0).is_err());
        assert_eq!(find_starting_vertices_widening(&m, &origin(), 2.0).unwrap(), (0, 1));
        let m = map(&[(0.5, 5.0), (0.5, -5.0)]);
        assert!(find_starting_vertices_widening(&m, &origin(), 2.0).is_err());
    }

    fn points_strategy(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..n)
    }

    proptest! {
        #[test]
        fn graph_matches_pair_filter(pts in points_strategy(20), d in 0.5..8.0f64) {
            let m = map(&pts);
            let g = construct_search_graph(&m, d);
            let p = m.points();
            for i in 0..p.len() {
                prop_assert!(!g.neighbors(i).contains(&i));
                for j in 0..p.len() {
                    if i == j { continue; }
                    prop_assert_eq!(g.has_edge(i, j), p[i].dist(p[j]) <= d);
                    prop_assert_eq!(g.has_edge(i, j), g.has_edge(j, i));
                }
            }
        }

        #[test]
        fn larger_dmax_keeps_edges(pts in points_strategy(20), d in 0.5..6.0f64, extra in 0.0..3.0f64) {
            let m = map(&pts);
            let small = construct_search_graph(&m, d);
            let big = construct_search_graph(&m, d + extra);
            for i in 0..m.len() {
                for &j in small.neighbors(i) {
                    prop_assert!(big.has_edge(i, j));
                }
            }
        }

        #[test]
        fn start_sides_have_correct_sign(
            pts in points_strategy(25),
            px in -3.0..3.0f64, py in -3.0..3.0f64, yaw in -3.2..3.2f64, radius in 1.0..6.0f64,
        ) {
            let m = map(&pts);
            let pose = CarPose::from_yaw(Point2::new(px, py), yaw);
            if let Ok((l, r)) = find_starting_vertices(&m, &pose, radius) {
                let dl = m.points()[l] - pose.position;
                let dr = m.points()[r] - pose.position;
                prop_assert!(pose.heading.cross(dl) > 0.0);
                prop_assert!(pose.heading.cross(dr) < 0.0);
                prop_assert!(dl.norm() <= radius && dr.norm() <= radius);
            }
        }

        #[test]
        fn start_pair_minimizes_score(pts in points_strategy(15), radius in 1.0..8.0f64) {
            let m = map(&pts);
            let pose = CarPose::from_yaw(Point2::new(0.0, 0.0), 0.3);
            let score = |i: usize, j: usize| {
                let a = m.points()[i] - pose.position;
                let b = m.points()[j] - pose.position;
                let aa = pose.heading.cross(a).atan2(pose.heading.dot(a)).abs();
                let ab = pose.heading.cross(b).atan2(pose.heading.dot(b)).abs();
                (a.norm() - b.norm()).abs() + (aa - ab).abs()
            };
            if let Ok((l, r)) = find_starting_vertices(&m, &pose, radius) {
                let best = score(l, r);
                for i in 0..m.len() {
                    for j in 0..m.len() {
                        let a = m.points()[i] - pose.position;
                        let b = m.points()[j] - pose.position;
                        if a.norm() <= radius && b.norm() <= radius
                            && pose.heading.cross(a) > 0.0 && pose.heading.cross(b) < 0.0 {
                            prop_assert!(score(i, j) >= best);
                        }
                    }
                }
            }
        }
    }
}
