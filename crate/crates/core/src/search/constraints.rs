//! Lane constraints: turn angles, lane width and polygon simplicity.
//!
//! [`LaneState`] evaluates them incrementally while the search pushes and pops
//! vertices; [`check_open_lane`] and [`check_closed_lane`] evaluate them from
//! scratch and serve as the reference.

use crate::geometry::{
    angle_between, compute_matching, lane_widths, polygon_simplicity_naive, segments_intersect,
    LanePolygon, MatchParam, MatchingState, Point2, Segment, Side,
};
use crate::graph::DetectionConfig;

/// Constraint status of one path pair, as seen by the search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NodeStatus {
    /// Some turn angle reached `theta_max`.
    pub angle_bad: bool,
    /// Two edges other than the closing edge intersect.
    pub simple_bad: bool,
    /// The closing edge intersects another edge.
    pub closing_bad: bool,
    /// Some matching line is at or below `w_min`.
    pub short_bad: bool,
    /// `long_targets[s]`: some matching line at or above `w_max` came from a query searching side `s`.
    pub long_targets: [bool; 2],
    /// Every too-long matching line came only from queries searching this side.
    pub long_single: Option<Side>,
}

impl NodeStatus {
    /// Violations that no extension can repair.
    pub fn dead(&self) -> bool {
        self.angle_bad || self.simple_bad || self.short_bad
    }

    /// The constraint decider.
    pub fn cd(&self) -> bool {
        !self.dead() && !self.closing_bad && !self.long_targets[0] && !self.long_targets[1]
    }

    /// Side whose growth is the only way to repair the current violations, if any.
    pub fn forced_side(&self) -> Option<Side> {
        if self.dead() {
            None
        } else {
            self.long_single
        }
    }
}

/// Backtracking decider.
///
/// `pushed` is the side extended to reach this pair, `has_unvisited[s]` whether
/// side `s` still had unexpanded neighbours before the push. Too-long matching
/// lines only shrink when the boundary they were searched on grows, so they are
/// permanent when that boundary can no longer be extended in this subtree.
pub fn btd(status: &NodeStatus, pushed: Option<Side>, has_unvisited: [bool; 2]) -> bool {
    if status.cd() {
        return false;
    }
    if status.dead() {
        return true;
    }
    Side::BOTH.iter().any(|&b| {
        let can_grow = pushed == Some(b) || has_unvisited[b.index()];
        status.long_targets[b.index()] && !can_grow
    })
}

fn angle_ok(pts: &[Point2], theta_max: f64) -> bool {
    pts.windows(3)
        .all(|w| angle_between(w[1] - w[0], w[2] - w[1]) < theta_max)
}

fn widths_ok(widths: &[f64], cfg: &DetectionConfig) -> bool {
    widths.iter().all(|&w| cfg.w_min < w && w < cfg.w_max)
}

/// From-scratch constraint decider on an open lane.
pub fn check_open_lane(left: &[Point2], right: &[Point2], cfg: &DetectionConfig) -> bool {
    if left.is_empty() || right.is_empty() {
        return false;
    }
    if !angle_ok(left, cfg.theta_max) || !angle_ok(right, cfg.theta_max) {
        return false;
    }
    let m = compute_matching(left, right, MatchParam::default());
    if !widths_ok(&lane_widths(left, right, &m), cfg) {
        return false;
    }
    polygon_simplicity_naive(&LanePolygon::from_boundaries(left, right)).is_simple()
}

fn closed_angles_ok(pts: &[Point2], theta_max: f64) -> bool {
    let n = pts.len();
    (0..n).all(|i| {
        let a = pts[(i + n - 1) % n];
        let b = pts[i];
        let c = pts[(i + 1) % n];
        angle_between(b - a, c - b) < theta_max
    })
}

fn ring_self_simple(ring: &[Point2]) -> bool {
    let n = ring.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let a = Segment::new(ring[i], ring[(i + 1) % n]);
            let b = Segment::new(ring[j], ring[(j + 1) % n]);
            if segments_intersect(a, b) {
                return false;
            }
        }
    }
    true
}

fn rings_disjoint(a: &[Point2], b: &[Point2]) -> bool {
    for i in 0..a.len() {
        let sa = Segment::new(a[i], a[(i + 1) % a.len()]);
        for j in 0..b.len() {
            if segments_intersect(sa, Segment::new(b[j], b[(j + 1) % b.len()])) {
                return false;
            }
        }
    }
    true
}

/// Closes a boundary by repeating its first point.
pub fn close_chain(pts: &[Point2]) -> Vec<Point2> {
    let mut v = pts.to_vec();
    v.push(pts[0]);
    v
}

/// From-scratch constraint decider on a closed lane (both boundaries are
/// rings; at least three points each).
pub fn check_closed_lane(left: &[Point2], right: &[Point2], cfg: &DetectionConfig) -> bool {
    if left.len() < 3 || right.len() < 3 {
        return false;
    }
    if !closed_angles_ok(left, cfg.theta_max) || !closed_angles_ok(right, cfg.theta_max) {
        return false;
    }
    let (lc, rc) = (close_chain(left), close_chain(right));
    let m = compute_matching(&lc, &rc, MatchParam::default());
    if !widths_ok(&lane_widths(&lc, &rc, &m), cfg) {
        return false;
    }
    ring_self_simple(left) && ring_self_simple(right) && rings_disjoint(left, right)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Edge {
    Left(usize),
    Right(usize),
    Start,
    Closing,
}

type VertexId = (u8, usize);

struct Chains<'a> {
    left: &'a [Point2],
    right: &'a [Point2],
}

impl Chains<'_> {
    fn ends(&self, e: Edge) -> (VertexId, VertexId) {
        match e {
            Edge::Left(i) => ((0, i), (0, i + 1)),
            Edge::Right(j) => ((1, j), (1, j + 1)),
            Edge::Start => ((1, 0), (0, 0)),
            Edge::Closing => ((0, self.left.len() - 1), (1, self.right.len() - 1)),
        }
    }

    fn pt(&self, v: VertexId) -> Point2 {
        if v.0 == 0 {
            self.left[v.1]
        } else {
            self.right[v.1]
        }
    }

    fn seg(&self, e: Edge) -> Segment {
        let (a, b) = self.ends(e);
        Segment::new(self.pt(a), self.pt(b))
    }

    fn adjacent(&self, a: Edge, b: Edge) -> bool {
        let (a0, a1) = self.ends(a);
        let (b0, b1) = self.ends(b);
        a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1
    }

    fn permanent_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let nl = self.left.len().saturating_sub(1);
        let nr = self.right.len().saturating_sub(1);
        (0..nl)
            .map(Edge::Left)
            .chain((0..nr).map(Edge::Right))
            .chain(std::iter::once(Edge::Start))
    }

    fn hits_any(&self, e: Edge) -> bool {
        let s = self.seg(e);
        self.permanent_edges()
            .filter(|&o| o != e && !self.adjacent(e, o))
            .any(|o| segments_intersect(s, self.seg(o)))
    }

    fn big_enough(&self) -> bool {
        self.left.len() + self.right.len() >= 4
    }
}

#[derive(Clone, Debug)]
struct Node {
    pushed: Option<Side>,
    status: NodeStatus,
    matching: Option<MatchingState>,
}

/// Incremental constraint evaluation along a DFS branch.
///
/// Each push stores the status of the new pair; pop restores the previous one.
pub struct LaneState<'a> {
    points: &'a [Point2],
    cfg: &'a DetectionConfig,
    paths: [Vec<usize>; 2],
    pts: [Vec<Point2>; 2],
    nodes: Vec<Node>,
}

impl<'a> LaneState<'a> {
    pub fn new(points: &'a [Point2], cfg: &'a DetectionConfig, start: (usize, usize)) -> Self {
        let mut s = LaneState {
            points,
            cfg,
            paths: [vec![start.0], vec![start.1]],
            pts: [vec![points[start.0]], vec![points[start.1]]],
            nodes: Vec::new(),
        };
        let node = s.evaluate(None, None);
        s.nodes.push(node);
        s
    }

    pub fn path(&self, side: Side) -> &[usize] {
        &self.paths[side.index()]
    }

    pub fn points(&self, side: Side) -> &[Point2] {
        &self.pts[side.index()]
    }

    pub fn last(&self, side: Side) -> usize {
        *self.paths[side.index()].last().expect("paths are nonempty")
    }

    /// Vertex before the last one, if the path has one.
    pub fn prev(&self, side: Side) -> Option<usize> {
        let p = &self.paths[side.index()];
        (p.len() >= 2).then(|| p[p.len() - 2])
    }

    pub fn status(&self) -> &NodeStatus {
        &self.top().status
    }

    pub fn pushed(&self) -> Option<Side> {
        self.top().pushed
    }

    pub fn cd(&self) -> bool {
        self.top().status.cd()
    }

    pub fn depth(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Matching of the current pair (empty once the branch is dead).
    pub fn matching(&self) -> MatchingState {
        self.top().matching.clone().unwrap_or_default()
    }

    fn top(&self) -> &Node {
        self.nodes.last().expect("root node exists")
    }

    pub fn push(&mut self, side: Side, v: usize) {
        self.paths[side.index()].push(v);
        self.pts[side.index()].push(self.points[v]);
        let parent = self.nodes.last().expect("root node exists");
        let node = if parent.status.dead() {
            Node { pushed: Some(side), status: parent.status, matching: None }
        } else {
            let parent_matching = parent.matching.clone();
            let inherited = parent.status;
            self.evaluate_push(side, inherited, parent_matching)
        };
        self.nodes.push(node);
    }

    pub fn pop(&mut self) {
        let node = self.nodes.pop().expect("cannot pop the root");
        let side = node.pushed.expect("cannot pop the root");
        self.paths[side.index()].pop();
        self.pts[side.index()].pop();
    }

    fn evaluate_push(&self, side: Side, parent: NodeStatus, parent_matching: Option<MatchingState>) -> Node {
        let mut status = NodeStatus::default();
        let pts = &self.pts[side.index()];
        let n = pts.len();
        if n >= 3 {
            let (a, b, c) = (pts[n - 3], pts[n - 2], pts[n - 1]);
            if angle_between(b - a, c - b) >= self.cfg.theta_max {
                status.angle_bad = true;
                return Node { pushed: Some(side), status, matching: None };
            }
        }
        let chains = Chains { left: &self.pts[0], right: &self.pts[1] };
        if chains.big_enough() {
            let new_edge = match side {
                Side::Left => Edge::Left(n - 2),
                Side::Right => Edge::Right(n - 2),
            };
            if parent.simple_bad || chains.hits_any(new_edge) {
                status.simple_bad = true;
                return Node { pushed: Some(side), status, matching: None };
            }
        }
        self.evaluate(Some(side), parent_matching)
    }

    /// Widths and closing edge for the current pair; angles and permanent
    /// simplicity are already known to hold.
    fn evaluate(&self, pushed: Option<Side>, parent_matching: Option<MatchingState>) -> Node {
        let mut status = NodeStatus::default();
        let (left, right) = (&self.pts[0], &self.pts[1]);
        let mut matching = parent_matching.unwrap_or_default();
        matching
            .advance_in_place(left, right)
            .expect("boundaries only grow along a branch");
        let (w_min, w_max) = (self.cfg.w_min, self.cfg.w_max);
        // Query widths never increase as the boundaries grow, so a short line
        // is permanent and a long one can only be repaired by its target.
        let mut single: Option<Option<Side>> = None;
        for q in matching.queries() {
            if q.width <= w_min {
                status.short_bad = true;
            } else if q.width >= w_max {
                let t = q.target();
                status.long_targets[t.index()] = true;
                single = Some(match single {
                    None => Some(t),
                    Some(prev) if prev == Some(t) => prev,
                    Some(_) => None,
                });
            }
        }
        status.long_single = single.flatten();
        if !status.dead() {
            let chains = Chains { left, right };
            status.closing_bad = chains.big_enough() && chains.hits_any(Edge::Closing);
        }
        Node { pushed, status, matching: Some(matching) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon_simplicity_naive;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn cfg() -> DetectionConfig {
        DetectionConfig::default()
    }

    #[test]
    fn parallel_straights_pass() {
        let l: Vec<_> = (0..4).map(|i| p(i as f64 * 3.0, 3.0)).collect();
        let r: Vec<_> = (0..4).map(|i| p(i as f64 * 3.0, 0.0)).collect();
        assert!(check_open_lane(&l, &r, &cfg()));
    }

    #[test]
    fn narrow_lane_fails() {
        let l: Vec<_> = (0..4).map(|i| p(i as f64 * 3.0, 2.0)).collect();
        let r: Vec<_> = (0..4).map(|i| p(i as f64 * 3.0, 0.0)).collect();
        assert!(!check_open_lane(&l, &r, &cfg()));
    }

    #[test]
    fn sharp_turn_fails() {
        let l = vec![p(0.0, 3.0), p(3.0, 3.0), p(3.0 + 3.0 * (-0.5f64), 3.0 + 3.0 * 0.866)];
        let r = vec![p(0.0, 0.0), p(3.0, 0.0)];
        assert!(!check_open_lane(&l, &r, &cfg()));
    }

    #[test]
    fn btd_cases() {
        let angle = NodeStatus { angle_bad: true, ..Default::default() };
        assert!(btd(&angle, Some(Side::Left), [true, true]));
        let long = NodeStatus { long_targets: [false, true], long_single: Some(Side::Right), ..Default::default() };
        assert!(!btd(&long, Some(Side::Left), [true, true]));
        assert!(btd(&long, Some(Side::Left), [true, false]));
        assert!(!btd(&long, Some(Side::Right), [true, false]));
        let short = NodeStatus { short_bad: true, ..Default::default() };
        assert!(btd(&short, Some(Side::Left), [true, true]));
        let closing = NodeStatus { closing_bad: true, ..Default::default() };
        assert!(!btd(&closing, Some(Side::Left), [false, false]));
        assert!(!btd(&NodeStatus::default(), None, [false, false]));
    }

    fn state_cd(l: &[Point2], r: &[Point2], order: &[Side]) -> (bool, NodeStatus) {
        let mut pts = vec![l[0], r[0]];
        pts.extend_from_slice(&l[1..]);
        pts.extend_from_slice(&r[1..]);
        let cfg = cfg();
        let mut st = LaneState::new(&pts, &cfg, (0, 1));
        let (mut li, mut ri) = (1, 1);
        for &s in order {
            match s {
                Side::Left => {
                    st.push(s, 2 + li - 1);
                    li += 1;
                }
                Side::Right => {
                    st.push(s, 2 + (l.len() - 1) + ri - 1);
                    ri += 1;
                }
            }
        }
        (st.cd(), *st.status())
    }

    prop_compose! {
        fn lane()(n in 1usize..6, m in 1usize..6, noise in prop::collection::vec(-1.2..1.2f64, 24),
                  w in 2.0..7.0f64, step in 2.0..5.0f64)
            -> (Vec<Point2>, Vec<Point2>) {
            let l = (0..n).map(|i| p(i as f64 * step + noise[2 * i], w + noise[2 * i + 1])).collect();
            let r = (0..m).map(|i| p(i as f64 * step + noise[12 + 2 * i], noise[13 + 2 * i])).collect();
            (l, r)
        }
    }

    proptest! {
        #[test]
        fn incremental_status_matches_scratch((l, r) in lane(), seed in any::<u64>()) {
            let mut order = Vec::new();
            let (mut a, mut b) = (l.len() - 1, r.len() - 1);
            let mut s = seed;
            while a + b > 0 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let left = b == 0 || (a > 0 && (s >> 33) % 2 == 0);
                if left { order.push(Side::Left); a -= 1; } else { order.push(Side::Right); b -= 1; }
            }
            let (cd, _) = state_cd(&l, &r, &order);
            prop_assert_eq!(cd, check_open_lane(&l, &r, &cfg()));
        }

        #[test]
        fn incremental_simplicity_matches_naive((l, r) in lane()) {
            let mut order = vec![Side::Left; l.len() - 1];
            order.extend(vec![Side::Right; r.len() - 1]);
            let (_, st) = state_cd(&l, &r, &order);
            if !st.angle_bad && !st.short_bad {
                let naive = polygon_simplicity_naive(&LanePolygon::from_boundaries(&l, &r)).is_simple();
                if !st.simple_bad {
                    prop_assert_eq!(naive, !st.closing_bad);
                } else {
                    prop_assert!(!naive);
                }
            }
        }
    }
}
