//! Low-level planar geometry for lane boundaries.
//!
//! Boundaries are polygonal chains parametrized over `[0, |P| - 1]`, so that
//! `P(i + λ) = (1 - λ)·p_i + λ·p_{i+1}`. On top of that this module provides
//! the matching points between two boundaries (nearest vertex/segment
//! correspondences in both directions), their incremental update as the
//! boundaries grow, lane polygon simplicity checks and a sampled polygon IoU.

use std::cmp::Ordering;
use std::ops::{Add, Deref, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance (m²) on the cross product used by orientation tests.
pub const ORIENTATION_EPS: f64 = 1e-9;

/// Default sampling resolution (m) for [`polygon_iou`].
pub const DEFAULT_IOU_RESOLUTION: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("non-finite coordinate ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("polyline must contain at least one point")]
    EmptyPolyline,
    #[error("consecutive polyline points {index} and {} coincide", index + 1)]
    RepeatedPoint { index: usize },
    #[error("parameter {param} outside polyline domain [0, {max}]")]
    OutOfDomain { param: f64, max: f64 },
    #[error("zero-length segment")]
    ZeroLengthSegment,
    #[error(
        "matching state was built for {state_left}+{state_right} points, \
         boundaries have {left}+{right}"
    )]
    InconsistentState {
        state_left: usize,
        state_right: usize,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Validating constructor for points coming from outside the library.
    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Point2 { x, y })
        } else {
            Err(GeometryError::NonFinite { x, y })
        }
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    #[inline]
    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn dist2(self, o: Point2) -> f64 {
        (self - o).norm2()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

/// Point at parameter `t ∈ [0, 1]` on segment `a → b`; the endpoints are returned exactly.
#[inline]
pub fn lerp(a: Point2, b: Point2, t: f64) -> Point2 {
    if t == 0.0 {
        a
    } else if t == 1.0 {
        b
    } else {
        a * (1.0 - t) + b * t
    }
}

/// Unsigned angle in `[0, π]` between two direction vectors.
#[inline]
pub fn angle_between(u: Point2, v: Point2) -> f64 {
    u.cross(v).abs().atan2(u.dot(v))
}

/// Signed angle in `(-π, π]` rotating `u` onto `v` (counter-clockwise positive).
#[inline]
pub fn signed_angle(u: Point2, v: Point2) -> f64 {
    u.cross(v).atan2(u.dot(v))
}

/// Which boundary of the lane. `Left` is side 0, `Right` is side 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left = 0,
    Right = 1,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }
}

/// A polygonal chain with at least one point and no repeated consecutive points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline(Vec<Point2>);

impl Polyline {
    pub fn new(points: Vec<Point2>) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::EmptyPolyline);
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite { x: p.x, y: p.y });
            }
            if i + 1 < points.len() && *p == points[i + 1] {
                return Err(GeometryError::RepeatedPoint { index: i });
            }
        }
        Ok(Polyline(points))
    }

    pub fn points(&self) -> &[Point2] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Point2> {
        self.0
    }

    /// Upper end of the parameter domain, `|P| - 1`.
    pub fn domain_end(&self) -> f64 {
        (self.0.len() - 1) as f64
    }
}

impl Deref for Polyline {
    type Target = [Point2];
    fn deref(&self) -> &[Point2] {
        &self.0
    }
}

/// Evaluates the chain at parameter `x ∈ [0, |P| - 1]`.
pub fn eval_polyline(points: &[Point2], x: f64) -> Result<Point2, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyPolyline);
    }
    let max = (points.len() - 1) as f64;
    if !(0.0..=max).contains(&x) {
        return Err(GeometryError::OutOfDomain { param: x, max });
    }
    Ok(eval_unchecked(points, x))
}

#[inline]
fn eval_unchecked(points: &[Point2], x: f64) -> Point2 {
    let i = x.floor();
    let idx = i as usize;
    let lambda = x - i;
    if lambda == 0.0 || idx + 1 >= points.len() {
        points[idx.min(points.len() - 1)]
    } else {
        lerp(points[idx], points[idx + 1], lambda)
    }
}

/// Sum of the Euclidean segment lengths; zero for a single point.
pub fn polyline_length(points: &[Point2]) -> f64 {
    points.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Absolute turn angle at `b` between directions `b - a` and `c - b`, in `[0, π]`.
pub fn segment_turn_angle(a: Point2, b: Point2, c: Point2) -> Result<f64, GeometryError> {
    let u = b - a;
    let v = c - b;
    if u.norm2() == 0.0 || v.norm2() == 0.0 {
        return Err(GeometryError::ZeroLengthSegment);
    }
    Ok(angle_between(u, v))
}

#[inline]
fn orientation(a: Point2, b: Point2, c: Point2) -> i8 {
    let v = (b - a).cross(c - a);
    if v > ORIENTATION_EPS {
        1
    } else if v < -ORIENTATION_EPS {
        -1
    } else {
        0
    }
}

#[inline]
fn within_box(a: Point2, b: Point2, p: Point2) -> bool {
    let eps = 1e-12;
    p.x >= a.x.min(b.x) - eps
        && p.x <= a.x.max(b.x) + eps
        && p.y >= a.y.min(b.y) - eps
        && p.y <= a.y.max(b.y) + eps
}

/// True iff the closed segments share at least one point. Collinear overlap counts.
pub fn segments_intersect(s1: Segment, s2: Segment) -> bool {
    let (p1, q1, p2, q2) = (s1.a, s1.b, s2.a, s2.b);
    let o1 = orientation(p1, q1, p2);
    let o2 = orientation(p1, q1, q2);
    let o3 = orientation(p2, q2, p1);
    let o4 = orientation(p2, q2, q1);
    if o1 != o2 && o3 != o4 {
        return true;
    }
    (o1 == 0 && within_box(p1, q1, p2))
        || (o2 == 0 && within_box(p1, q1, q2))
        || (o3 == 0 && within_box(p2, q2, p1))
        || (o4 == 0 && within_box(p2, q2, q1))
}

/// Parameter in `[0, 1]` of the point on `a → b` closest to `p`.
#[inline]
pub fn project_param(p: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return 0.0;
    }
    ((p - a).dot(d) / l2).clamp(0.0, 1.0)
}

/// Distance from `p` to the closed segment `a → b`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    p.dist(lerp(a, b, project_param(p, a, b)))
}

/// Pair of parameters on a matched left/right boundary pair.
///
/// Ordered lexicographically by `(u, v)`; coordinates are finite and
/// non-negative so the total order agrees with the numeric one.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct MatchParam {
    pub u: f64,
    pub v: f64,
}

impl MatchParam {
    pub const fn new(u: f64, v: f64) -> Self {
        MatchParam { u, v }
    }
}

impl PartialEq for MatchParam {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for MatchParam {}

impl PartialOrd for MatchParam {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MatchParam {
    fn cmp(&self, other: &Self) -> Ordering {
        self.u
            .total_cmp(&other.u)
            .then_with(|| self.v.total_cmp(&other.v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QueryKind {
    Vertex,
    Segment,
}

/// A nearest-neighbour query: vertex or segment `index` of boundary `side`,
/// searched against the whole opposite boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Query {
    pub side: Side,
    pub kind: QueryKind,
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nearest {
    pub param: MatchParam,
    pub distance: f64,
}

/// Best candidate found so far for one query.
#[derive(Clone, Copy, Debug)]
struct Best {
    param: MatchParam,
    dist2: f64,
}

impl Best {
    /// Strict order on (distance, query parameter, target parameter).
    #[inline]
    fn improves_on(&self, other: &Best, side: Side) -> bool {
        match self.dist2.total_cmp(&other.dist2) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match side {
                Side::Left => self.param < other.param,
                Side::Right => (self.param.v, self.param.u) < (other.param.v, other.param.u),
            },
        }
    }
}

#[inline]
fn param_at(index: usize, t: f64) -> f64 {
    index as f64 + t + 0.0
}

#[inline]
fn make_param(side: Side, query_param: f64, target_param: f64) -> MatchParam {
    match side {
        Side::Left => MatchParam::new(query_param, target_param),
        Side::Right => MatchParam::new(target_param, query_param),
    }
}

/// Closest pair between query segment `q0 → q1` and target segment `t0 → t1`,
/// as local parameters `(s, t)` and squared distance. Non-crossing pairs are
/// resolved through the four endpoint projections so that every route to the
/// same geometric pair yields bit-identical parameters.
fn segment_segment(q0: Point2, q1: Point2, t0: Point2, t1: Point2) -> [(f64, f64, f64); 4] {
    let s_a = project_param(t0, q0, q1);
    let s_b = project_param(t1, q0, q1);
    let t_a = project_param(q0, t0, t1);
    let t_b = project_param(q1, t0, t1);
    [
        (0.0, t_a, q0.dist2(lerp(t0, t1, t_a))),
        (1.0, t_b, q1.dist2(lerp(t0, t1, t_b))),
        (s_a, 0.0, lerp(q0, q1, s_a).dist2(t0)),
        (s_b, 1.0, lerp(q0, q1, s_b).dist2(t1)),
    ]
}

/// Proper crossing (strict orientation on both sides) and its local parameters.
fn proper_crossing(q0: Point2, q1: Point2, t0: Point2, t1: Point2) -> Option<(f64, f64)> {
    let r = q1 - q0;
    let s = t1 - t0;
    let d1 = r.cross(t0 - q0);
    let d2 = r.cross(t1 - q0);
    let d3 = s.cross(q0 - t0);
    let d4 = s.cross(q1 - t0);
    if (d1 > 0.0) != (d2 > 0.0) && d1 != 0.0 && d2 != 0.0 && (d3 > 0.0) != (d4 > 0.0) && d3 != 0.0 && d4 != 0.0 {
        let denom = r.cross(s);
        if denom == 0.0 {
            return None;
        }
        let sp = ((t0 - q0).cross(s) / denom).clamp(0.0, 1.0);
        let tp = ((t0 - q0).cross(r) / denom).clamp(0.0, 1.0);
        Some((sp, tp))
    } else {
        None
    }
}

enum QueryGeom {
    Vertex(Point2, f64),
    Segment(Point2, Point2, usize),
}

fn query_geom(points: &[Point2], kind: QueryKind, index: usize) -> QueryGeom {
    match kind {
        QueryKind::Vertex => QueryGeom::Vertex(points[index], index as f64),
        QueryKind::Segment => QueryGeom::Segment(points[index], points[index + 1], index),
    }
}

/// Scans target segments `from_seg..` (or the single target point) and folds
/// the result into `best`.
fn scan_target(
    side: Side,
    geom: &QueryGeom,
    target: &[Point2],
    from_seg: usize,
    mut best: Option<Best>,
) -> Best {
    let mut consider = |param: MatchParam, dist2: f64| {
        let cand = Best { param, dist2 };
        match &best {
            Some(b) if !cand.improves_on(b, side) => {}
            _ => best = Some(cand),
        }
    };
    if target.len() == 1 {
        let tp = target[0];
        match *geom {
            QueryGeom::Vertex(q, qp) => consider(make_param(side, qp, 0.0), q.dist2(tp)),
            QueryGeom::Segment(q0, q1, qi) => {
                let s = project_param(tp, q0, q1);
                consider(make_param(side, param_at(qi, s), 0.0), lerp(q0, q1, s).dist2(tp));
            }
        }
    } else {
        for j in from_seg..target.len() - 1 {
            let (t0, t1) = (target[j], target[j + 1]);
            match *geom {
                QueryGeom::Vertex(q, qp) => {
                    let t = project_param(q, t0, t1);
                    consider(make_param(side, qp, param_at(j, t)), q.dist2(lerp(t0, t1, t)));
                }
                QueryGeom::Segment(q0, q1, qi) => {
                    if let Some((s, t)) = proper_crossing(q0, q1, t0, t1) {
                        consider(make_param(side, param_at(qi, s), param_at(j, t)), 0.0);
                    }
                    for (s, t, d2) in segment_segment(q0, q1, t0, t1) {
                        consider(make_param(side, param_at(qi, s), param_at(j, t)), d2);
                    }
                }
            }
        }
    }
    best.expect("target has at least one point")
}

fn query_and_target<'a>(
    left: &'a [Point2],
    right: &'a [Point2],
    side: Side,
) -> (&'a [Point2], &'a [Point2]) {
    match side {
        Side::Left => (left, right),
        Side::Right => (right, left),
    }
}

/// Nearest pair between one query (vertex or segment of one boundary) and the
/// whole opposite boundary. Ties resolve to the smallest query parameter, then
/// the smallest target parameter.
pub fn nearest_on_target(left: &[Point2], right: &[Point2], query: Query) -> Nearest {
    let (qpts, target) = query_and_target(left, right, query.side);
    let geom = query_geom(qpts, query.kind, query.index);
    let best = scan_target(query.side, &geom, target, 0, None);
    Nearest {
        param: best.param,
        distance: best.dist2.sqrt(),
    }
}

/// All queries of both boundaries in a fixed order: left vertices, left
/// segments, right vertices, right segments.
pub fn all_queries(left_len: usize, right_len: usize) -> Vec<Query> {
    let mut out = Vec::with_capacity(2 * (left_len + right_len));
    for (side, len) in [(Side::Left, left_len), (Side::Right, right_len)] {
        for index in 0..len {
            out.push(Query { side, kind: QueryKind::Vertex, index });
        }
        for index in 0..len.saturating_sub(1) {
            out.push(Query { side, kind: QueryKind::Segment, index });
        }
    }
    out
}

/// Matching points between two boundaries: union of the nearest-neighbour
/// results of every vertex and segment of each boundary against the other,
/// restricted to queries whose own parameter interval ends at or after the
/// corresponding coordinate of `from`. Sorted and deduplicated.
pub fn compute_matching(left: &[Point2], right: &[Point2], from: MatchParam) -> Vec<MatchParam> {
    assert!(!left.is_empty() && !right.is_empty(), "boundaries must be nonempty");
    let mut out: Vec<MatchParam> = all_queries(left.len(), right.len())
        .into_iter()
        .filter(|q| {
            let start = match q.side {
                Side::Left => from.u,
                Side::Right => from.v,
            };
            let end = match q.kind {
                QueryKind::Vertex => q.index as f64,
                QueryKind::Segment => (q.index + 1) as f64,
            };
            end >= start
        })
        .map(|q| nearest_on_target(left, right, q).param)
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Width of the matching line `L(u) → R(v)`.
#[inline]
pub fn width_at(left: &[Point2], right: &[Point2], m: MatchParam) -> f64 {
    eval_unchecked(left, m.u).dist(eval_unchecked(right, m.v))
}

/// One width per matching point, order preserved.
pub fn lane_widths(left: &[Point2], right: &[Point2], matching: &[MatchParam]) -> Vec<f64> {
    matching.iter().map(|&m| width_at(left, right, m)).collect()
}

/// A matching line together with its width and which boundaries its
/// originating queries searched (`targets[side]`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchLine {
    pub param: MatchParam,
    pub width: f64,
    pub targets: [bool; 2],
}

/// One query with its best match on the part of the target seen so far.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueryState {
    pub query: Query,
    pub best: MatchParam,
    pub width: f64,
    dist2: f64,
    target_seen: usize,
}

impl QueryState {
    /// Boundary this query searches.
    pub fn target(&self) -> Side {
        self.query.side.other()
    }
}

/// Matching maintained while both boundaries grow.
///
/// Every query keeps its best match; an update scans only new queries against
/// the whole target and old queries against the new target segments. Widths
/// therefore equal a batch recomputation exactly, and each query's width is
/// nonincreasing as the boundaries grow.
///
/// Lines are split into `fixed` (before the first line touching the end of
/// either boundary) and `mutable` (the rest).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MatchingState {
    queries: Vec<QueryState>,
    left_len: usize,
    right_len: usize,
}

impl MatchingState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.left_len == 0 && self.right_len == 0
    }

    pub fn queries(&self) -> &[QueryState] {
        &self.queries
    }

    /// Boundary sizes this state was computed for.
    pub fn lens(&self) -> (usize, usize) {
        (self.left_len, self.right_len)
    }

    /// Distinct matching lines sorted by parameter.
    pub fn lines(&self) -> Vec<MatchLine> {
        let mut order: Vec<&QueryState> = self.queries.iter().collect();
        order.sort_by(|a, b| a.best.cmp(&b.best));
        let mut out: Vec<MatchLine> = Vec::with_capacity(order.len());
        for q in order {
            match out.last_mut() {
                Some(l) if l.param == q.best => l.targets[q.target().index()] = true,
                _ => {
                    let mut targets = [false; 2];
                    targets[q.target().index()] = true;
                    out.push(MatchLine { param: q.best, width: q.width, targets });
                }
            }
        }
        out
    }

    fn split_index(&self, lines: &[MatchLine]) -> usize {
        let left_end = self.left_len.saturating_sub(1) as f64;
        let right_end = self.right_len.saturating_sub(1) as f64;
        lines
            .iter()
            .position(|l| l.param.u == left_end || l.param.v == right_end)
            .unwrap_or(lines.len())
    }

    pub fn fixed(&self) -> Vec<MatchLine> {
        let mut lines = self.lines();
        lines.truncate(self.split_index(&lines));
        lines
    }

    pub fn mutable(&self) -> Vec<MatchLine> {
        let lines = self.lines();
        lines[self.split_index(&lines)..].to_vec()
    }

    /// Widths of all lines in parameter order.
    pub fn widths(&self) -> Vec<f64> {
        self.lines().iter().map(|l| l.width).collect()
    }

    /// All matching parameters, sorted lexicographically.
    pub fn all_params(&self) -> Vec<MatchParam> {
        self.lines().iter().map(|l| l.param).collect()
    }

    pub fn from_batch(left: &[Point2], right: &[Point2]) -> Self {
        Self::new().advance(left, right).expect("nonempty boundaries")
    }

    /// Updates the matching after `left`/`right` grew from the sizes this
    /// state was computed for. The existing points must be unchanged.
    pub fn advance(&self, left: &[Point2], right: &[Point2]) -> Result<Self, GeometryError> {
        let mut next = self.clone();
        next.advance_in_place(left, right)?;
        Ok(next)
    }

    pub fn advance_in_place(&mut self, left: &[Point2], right: &[Point2]) -> Result<(), GeometryError> {
        if left.is_empty() || right.is_empty() {
            return Err(GeometryError::EmptyPolyline);
        }
        if left.len() < self.left_len || right.len() < self.right_len {
            return Err(GeometryError::InconsistentState {
                state_left: self.left_len,
                state_right: self.right_len,
                left: left.len(),
                right: right.len(),
            });
        }
        let old_lens = [self.left_len, self.right_len];
        let new_lens = [left.len(), right.len()];
        for q in &mut self.queries {
            let (qpts, target) = query_and_target(left, right, q.query.side);
            if target.len() > q.target_seen {
                let geom = query_geom(qpts, q.query.kind, q.query.index);
                let best = scan_target(
                    q.query.side,
                    &geom,
                    target,
                    q.target_seen.saturating_sub(1),
                    Some(Best { param: q.best, dist2: q.dist2 }),
                );
                if best.param != q.best {
                    q.best = best.param;
                    q.dist2 = best.dist2;
                    q.width = width_at(left, right, best.param);
                }
                q.target_seen = target.len();
            }
        }
        for side in Side::BOTH {
            let (old, new) = (old_lens[side.index()], new_lens[side.index()]);
            let (qpts, target) = query_and_target(left, right, side);
            let vertex_queries = (old..new).map(|index| (QueryKind::Vertex, index));
            let segment_queries =
                (old.saturating_sub(1)..new.saturating_sub(1)).map(|index| (QueryKind::Segment, index));
            for (kind, index) in vertex_queries.chain(segment_queries) {
                let geom = query_geom(qpts, kind, index);
                let best = scan_target(side, &geom, target, 0, None);
                self.queries.push(QueryState {
                    query: Query { side, kind, index },
                    best: best.param,
                    width: width_at(left, right, best.param),
                    dist2: best.dist2,
                    target_seen: target.len(),
                });
            }
        }
        self.left_len = left.len();
        self.right_len = right.len();
        Ok(())
    }
}

/// Updates `state` for boundaries that extend those it was computed for.
pub fn online_lane_width(
    left: &[Point2],
    right: &[Point2],
    state: &MatchingState,
) -> Result<MatchingState, GeometryError> {
    state.advance(left, right)
}

/// Lane polygon: left boundary followed by the right boundary reversed.
///
/// Edge `i` joins vertex `i` to vertex `(i + 1) mod k`. Edge `|L| - 1` is the
/// segment between the last points of both boundaries (the closing edge);
/// edge `k - 1` joins the first right point back to the first left point.
#[derive(Clone, Debug, PartialEq)]
pub struct LanePolygon {
    vertices: Vec<Point2>,
    left_len: usize,
}

impl LanePolygon {
    pub fn from_boundaries(left: &[Point2], right: &[Point2]) -> Self {
        let mut vertices = Vec::with_capacity(left.len() + right.len());
        vertices.extend_from_slice(left);
        vertices.extend(right.iter().rev().copied());
        LanePolygon { vertices, left_len: left.len() }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn left_len(&self) -> usize {
        self.left_len
    }

    pub fn edge_count(&self) -> usize {
        if self.vertices.len() < 2 {
            0
        } else {
            self.vertices.len()
        }
    }

    pub fn edge(&self, i: usize) -> Segment {
        let k = self.vertices.len();
        Segment::new(self.vertices[i], self.vertices[(i + 1) % k])
    }

    /// Index of the edge between the last left and last right point.
    pub fn closing_edge(&self) -> usize {
        self.left_len - 1
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        let k = self.vertices.len();
        i == j || (i + 1) % k == j || (j + 1) % k == i
    }

    /// Shoelace area (absolute value).
    pub fn area(&self) -> f64 {
        ring_area(&self.vertices)
    }
}

fn ring_area(ring: &[Point2]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        acc += ring[i].cross(ring[(i + 1) % n]);
    }
    (acc * 0.5).abs()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimplicityReport {
    /// Intersecting non-adjacent edge pairs `(i, j)` with `i < j`, sorted.
    pub violations: Vec<(usize, usize)>,
    /// Every violation involves the closing edge (vacuously true when empty).
    pub only_closing: bool,
}

impl SimplicityReport {
    pub fn is_simple(&self) -> bool {
        self.violations.is_empty()
    }
}

fn report(poly: &LanePolygon, mut violations: Vec<(usize, usize)>) -> SimplicityReport {
    violations.sort_unstable();
    violations.dedup();
    let c = poly.closing_edge();
    let only_closing = violations.iter().all(|&(i, j)| i == c || j == c);
    SimplicityReport { violations, only_closing }
}

/// Checks the edges in `new_edges` against every other non-adjacent edge.
/// If the polygon without those edges was simple, an empty report means the
/// polygon is simple.
pub fn polygon_is_simple_incremental(poly: &LanePolygon, new_edges: &[usize]) -> SimplicityReport {
    let k = poly.edge_count();
    let mut violations = Vec::new();
    if k >= 4 {
        for &e in new_edges {
            let se = poly.edge(e);
            for j in 0..k {
                if poly.adjacent(e, j) {
                    continue;
                }
                if segments_intersect(se, poly.edge(j)) {
                    violations.push((e.min(j), e.max(j)));
                }
            }
        }
    }
    report(poly, violations)
}

/// All-pairs simplicity check.
pub fn polygon_simplicity_naive(poly: &LanePolygon) -> SimplicityReport {
    let k = poly.edge_count();
    let mut violations = Vec::new();
    if k >= 4 {
        for i in 0..k {
            for j in i + 1..k {
                if !poly.adjacent(i, j) && segments_intersect(poly.edge(i), poly.edge(j)) {
                    violations.push((i, j));
                }
            }
        }
    }
    report(poly, violations)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IouResult {
    pub iou: f64,
    /// At least one region has zero area (no grid sample inside).
    pub degenerate: bool,
}

/// Even-odd point-in-region test over a set of closed rings.
pub fn point_in_rings(p: Point2, rings: &[Vec<Point2>]) -> bool {
    let mut inside = false;
    for ring in rings {
        let n = ring.len();
        if n < 3 {
            continue;
        }
        for i in 0..n {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) && p.x < crossing_x(a, b, p.y) {
                inside = !inside;
            }
        }
    }
    inside
}

#[inline]
fn crossing_x(a: Point2, b: Point2, y: f64) -> f64 {
    a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y)
}

/// Distance from `p` to the nearest ring edge.
pub fn distance_to_rings(p: Point2, rings: &[Vec<Point2>]) -> f64 {
    let mut best = f64::INFINITY;
    for ring in rings {
        let n = ring.len();
        if n == 1 {
            best = best.min(p.dist(ring[0]));
        }
        if n < 2 {
            continue;
        }
        for i in 0..n {
            best = best.min(point_segment_distance(p, ring[i], ring[(i + 1) % n]));
        }
    }
    best
}

struct Grid {
    x0: f64,
    y0: f64,
    res: f64,
    cols: usize,
    rows: usize,
}

impl Grid {
    #[inline]
    fn x(&self, c: usize) -> f64 {
        self.x0 + (c as f64 + 0.5) * self.res
    }
    #[inline]
    fn y(&self, r: usize) -> f64 {
        self.y0 + (r as f64 + 0.5) * self.res
    }
}

/// Inside column ranges `[start, end)` of one grid row; same decision as
/// [`point_in_rings`] at every sample.
fn row_ranges(grid: &Grid, rings: &[Vec<Point2>], y: f64, xs: &mut Vec<f64>, out: &mut Vec<(usize, usize)>) {
    xs.clear();
    out.clear();
    for ring in rings {
        let n = ring.len();
        if n < 3 {
            continue;
        }
        for i in 0..n {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            if (a.y > y) != (b.y > y) {
                xs.push(crossing_x(a, b, y));
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    // A sample is inside iff an odd number of crossings lie strictly to its right,
    // i.e. it sits in [xs[2k], xs[2k+1]).
    for pair in xs.chunks_exact(2) {
        let start = partition_cols(grid, |x| x < pair[0]);
        let end = partition_cols(grid, |x| x < pair[1]);
        if end > start {
            out.push((start, end));
        }
    }
}

fn partition_cols(grid: &Grid, pred: impl Fn(f64) -> bool) -> usize {
    let (mut lo, mut hi) = (0usize, grid.cols);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(grid.x(mid)) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn ranges_len(r: &[(usize, usize)]) -> usize {
    r.iter().map(|&(a, b)| b - a).sum()
}

fn ranges_overlap(a: &[(usize, usize)], b: &[(usize, usize)]) -> usize {
    let (mut i, mut j, mut acc) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            acc += hi - lo;
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    acc
}

/// IoU of two even-odd regions by uniform grid sampling at `resolution` over
/// the joint bounding box.
///
/// Only samples within `resolution` of a region boundary can be misclassified,
/// so the absolute error on either area is bounded by roughly
/// `perimeter · resolution`, and the IoU error by `O(perimeter · ρ / area)`.
pub fn region_iou(a: &[Vec<Point2>], b: &[Vec<Point2>], resolution: f64) -> IouResult {
    assert!(resolution > 0.0, "resolution must be positive");
    let pts = a.iter().chain(b.iter()).flatten();
    let (mut minx, mut miny, mut maxx, mut maxy) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        minx = minx.min(p.x);
        miny = miny.min(p.y);
        maxx = maxx.max(p.x);
        maxy = maxy.max(p.y);
    }
    if !minx.is_finite() {
        return IouResult { iou: 0.0, degenerate: true };
    }
    let grid = Grid {
        x0: minx,
        y0: miny,
        res: resolution,
        cols: ((maxx - minx) / resolution).ceil().max(1.0) as usize,
        rows: ((maxy - miny) / resolution).ceil().max(1.0) as usize,
    };
    let (mut na, mut nb, mut ninter) = (0usize, 0usize, 0usize);
    let (mut xs, mut ra, mut rb) = (Vec::new(), Vec::new(), Vec::new());
    for r in 0..grid.rows {
        let y = grid.y(r);
        row_ranges(&grid, a, y, &mut xs, &mut ra);
        row_ranges(&grid, b, y, &mut xs, &mut rb);
        na += ranges_len(&ra);
        nb += ranges_len(&rb);
        ninter += ranges_overlap(&ra, &rb);
    }
    if na == 0 || nb == 0 {
        return IouResult { iou: 0.0, degenerate: true };
    }
    let union = na + nb - ninter;
    IouResult { iou: ninter as f64 / union as f64, degenerate: false }
}

/// Grid-sampled IoU between two lane polygons.
pub fn polygon_iou(a: &LanePolygon, b: &LanePolygon, resolution: f64) -> IouResult {
    let degenerate = a.area() == 0.0 || b.area() == 0.0;
    if degenerate {
        return IouResult { iou: 0.0, degenerate: true };
    }
    region_iou(std::slice::from_ref(&a.vertices), std::slice::from_ref(&b.vertices), resolution)
}

/// Reference IoU with a per-sample point-in-polygon test; quadratic cost.
pub fn region_iou_naive(a: &[Vec<Point2>], b: &[Vec<Point2>], resolution: f64) -> IouResult {
    let pts: Vec<Point2> = a.iter().chain(b.iter()).flatten().copied().collect();
    if pts.is_empty() {
        return IouResult { iou: 0.0, degenerate: true };
    }
    let minx = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let miny = pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let maxx = pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let maxy = pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let grid = Grid {
        x0: minx,
        y0: miny,
        res: resolution,
        cols: ((maxx - minx) / resolution).ceil().max(1.0) as usize,
        rows: ((maxy - miny) / resolution).ceil().max(1.0) as usize,
    };
    let (mut na, mut nb, mut ni) = (0, 0, 0);
    for r in 0..grid.rows {
        for c in 0..grid.cols {
            let p = Point2::new(grid.x(c), grid.y(r));
            let (ia, ib) = (point_in_rings(p, a), point_in_rings(p, b));
            na += ia as usize;
            nb += ib as usize;
            ni += (ia && ib) as usize;
        }
    }
    if na == 0 || nb == 0 {
        return IouResult { iou: 0.0, degenerate: true };
    }
    IouResult { iou: ni as f64 / (na + nb - ni) as f64, degenerate: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn seg(a: (f64, f64), b: (f64, f64)) -> Segment {
        Segment::new(p(a.0, a.1), p(b.0, b.1))
    }

    #[test]
    fn eval_examples() {
        let a = [p(0.0, 0.0), p(2.0, 0.0)];
        assert_eq!(eval_polyline(&a, 0.0).unwrap(), p(0.0, 0.0));
        assert_eq!(eval_polyline(&a, 0.5).unwrap(), p(1.0, 0.0));
        let b = [p(0.0, 0.0), p(2.0, 0.0), p(2.0, 2.0)];
        assert_eq!(eval_polyline(&b, 1.25).unwrap(), p(2.0, 0.5));
        assert_eq!(eval_polyline(&b, 2.0).unwrap(), p(2.0, 2.0));
        assert!(matches!(eval_polyline(&b, 2.5), Err(GeometryError::OutOfDomain { .. })));
        assert!(eval_polyline(&b, -0.1).is_err());
    }

    #[test]
    fn polyline_validation() {
        assert!(Polyline::new(vec![]).is_err());
        assert!(Polyline::new(vec![p(0.0, 0.0), p(0.0, 0.0)]).is_err());
        assert!(Polyline::new(vec![p(f64::NAN, 0.0)]).is_err());
        assert_eq!(Polyline::new(vec![p(0.0, 0.0), p(1.0, 0.0)]).unwrap().domain_end(), 1.0);
        assert!(Point2::try_new(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn length_examples() {
        assert_eq!(polyline_length(&[p(0.0, 0.0)]), 0.0);
        assert_eq!(polyline_length(&[p(0.0, 0.0), p(3.0, 4.0)]), 5.0);
        assert_eq!(polyline_length(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)]), 2.0);
    }

    #[test]
    fn turn_angle_examples() {
        let o = p(0.0, 0.0);
        let x = p(1.0, 0.0);
        assert_eq!(segment_turn_angle(o, x, p(2.0, 0.0)).unwrap(), 0.0);
        assert!((segment_turn_angle(o, x, p(1.0, 1.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((segment_turn_angle(o, x, o).unwrap() - PI).abs() < 1e-15);
        assert!(segment_turn_angle(o, o, x).is_err());
    }

    #[test]
    fn intersection_examples() {
        assert!(segments_intersect(seg((0.0, 0.0), (2.0, 0.0)), seg((1.0, -1.0), (1.0, 1.0))));
        assert!(!segments_intersect(seg((0.0, 0.0), (1.0, 0.0)), seg((0.0, 1.0), (1.0, 1.0))));
        assert!(segments_intersect(seg((0.0, 0.0), (2.0, 0.0)), seg((1.0, 0.0), (3.0, 0.0))));
        assert!(!segments_intersect(seg((0.0, 0.0), (1.0, 0.0)), seg((2.0, 0.0), (3.0, 0.0))));
        assert!(segments_intersect(seg((0.0, 0.0), (1.0, 0.0)), seg((1.0, 0.0), (1.0, 5.0))));
    }

    #[test]
    fn nearest_examples() {
        let l = [p(0.0, 0.0)];
        let r = [p(0.0, 3.0), p(4.0, 3.0)];
        let n = nearest_on_target(&l, &r, Query { side: Side::Left, kind: QueryKind::Vertex, index: 0 });
        assert_eq!(n.param, MatchParam::new(0.0, 0.0));
        assert_eq!(n.distance, 3.0);

        let l = [p(0.0, 0.0), p(4.0, 0.0)];
        let r = [p(2.0, 1.0), p(2.0, 5.0)];
        let n = nearest_on_target(&l, &r, Query { side: Side::Left, kind: QueryKind::Segment, index: 0 });
        assert!((n.distance - 1.0).abs() < 1e-12);
        assert_eq!(n.param, MatchParam::new(0.5, 0.0));
    }

    #[test]
    fn matching_examples() {
        let l = [p(0.0, 0.0), p(4.0, 0.0)];
        let r = [p(0.0, 3.0), p(4.0, 3.0)];
        let m = compute_matching(&l, &r, MatchParam::default());
        assert!(!m.is_empty());
        assert!(lane_widths(&l, &r, &m).iter().all(|&w| (w - 3.0).abs() < 1e-12));

        let m = compute_matching(&[p(0.0, 0.0)], &[p(0.0, 3.0)], MatchParam::default());
        assert_eq!(m, vec![MatchParam::new(0.0, 0.0)]);
        assert_eq!(lane_widths(&[p(0.0, 0.0)], &[p(0.0, 3.0)], &m), vec![3.0]);
        assert!(lane_widths(&l, &r, &[]).is_empty());
    }

    #[test]
    fn funnel_widths() {
        let l = [p(0.0, 0.0), p(4.0, 0.0)];
        let r = [p(0.0, 3.0), p(4.0, 6.0)];
        let m = compute_matching(&l, &r, MatchParam::default());
        let w = lane_widths(&l, &r, &m);
        assert!((w[0] - 3.0).abs() < 1e-12 && m[0].u == 0.0);
        assert!(w.windows(2).all(|x| x[0] <= x[1] + 1e-12), "{w:?}");
        // Dense-sampling oracle for the minimum width.
        let min = (0..=4000)
            .map(|i| point_segment_distance(eval_polyline(&l, i as f64 / 4000.0).unwrap(), r[0], r[1]))
            .fold(f64::INFINITY, f64::min);
        assert!((w.iter().cloned().fold(f64::INFINITY, f64::min) - min).abs() < 1e-9);
    }

    #[test]
    fn from_restricts_queries() {
        let l: Vec<_> = (0..4).map(|i| p(i as f64, 0.0)).collect();
        let r: Vec<_> = (0..4).map(|i| p(i as f64, 3.0)).collect();
        let m = compute_matching(&l, &r, MatchParam::new(2.0, 2.0));
        assert!(m.iter().all(|x| x.u >= 1.0 || x.v >= 1.0));
        assert!(m.len() < compute_matching(&l, &r, MatchParam::default()).len());
    }

    #[test]
    fn straight_growth_fixed_is_prefix_chain() {
        let l: Vec<_> = (0..6).map(|i| p(3.0 * i as f64, 3.0)).collect();
        let r: Vec<_> = (0..6).map(|i| p(3.0 * i as f64, 0.0)).collect();
        let mut st = MatchingState::new();
        let mut prev_fixed: Vec<MatchParam> = Vec::new();
        for k in 1..=6 {
            for (a, b) in [(k, k - 1), (k, k)] {
                if b == 0 {
                    continue;
                }
                st = online_lane_width(&l[..a], &r[..b], &st).unwrap();
                let batch = compute_matching(&l[..a], &r[..b], MatchParam::default());
                assert_eq!(st.all_params(), batch);
                let fixed: Vec<_> = st.fixed().iter().map(|x| x.param).collect();
                assert!(fixed.starts_with(&prev_fixed));
                prev_fixed = fixed;
            }
        }
        assert!(!prev_fixed.is_empty());
    }

    #[test]
    fn shrinking_state_is_rejected() {
        let l = [p(0.0, 0.0), p(1.0, 0.0)];
        let r = [p(0.0, 3.0), p(1.0, 3.0)];
        let st = MatchingState::from_batch(&l, &r);
        assert!(st.advance(&l[..1], &r).is_err());
    }

    #[test]
    fn simplicity_examples() {
        let l = [p(0.0, 3.0), p(3.0, 3.0), p(6.0, 3.0)];
        let r = [p(0.0, 0.0), p(3.0, 0.0), p(6.0, 0.0)];
        assert!(polygon_simplicity_naive(&LanePolygon::from_boundaries(&l, &r)).is_simple());
        let bow = LanePolygon::from_boundaries(&[p(0.0, 0.0), p(2.0, 0.0)], &[p(2.0, 2.0), p(0.0, 2.0)]);
        let rep = polygon_simplicity_naive(&bow);
        assert!(!rep.is_simple());
        assert_eq!(rep, polygon_is_simple_incremental(&bow, &[0, 1, 2, 3]));
    }

    #[test]
    fn polygon_layout() {
        let l = [p(0.0, 1.0), p(1.0, 1.0)];
        let r = [p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)];
        let poly = LanePolygon::from_boundaries(&l, &r);
        assert_eq!(poly.vertices(), &[l[0], l[1], r[2], r[1], r[0]]);
        assert_eq!(poly.closing_edge(), 1);
        assert_eq!(poly.edge(1), Segment::new(l[1], r[2]));
    }

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point2> {
        vec![p(x0, y0), p(x1, y0), p(x1, y1), p(x0, y1)]
    }

    #[test]
    fn iou_examples() {
        let a = LanePolygon::from_boundaries(&[p(0.0, 3.0), p(10.0, 3.0)], &[p(0.0, 0.0), p(10.0, 0.0)]);
        let r = polygon_iou(&a, &a, DEFAULT_IOU_RESOLUTION);
        assert!((r.iou - 1.0).abs() <= 0.02 && !r.degenerate);
        let b = LanePolygon::from_boundaries(&[p(20.0, 3.0), p(30.0, 3.0)], &[p(20.0, 0.0), p(30.0, 0.0)]);
        assert_eq!(polygon_iou(&a, &b, DEFAULT_IOU_RESOLUTION).iou, 0.0);
        let c = LanePolygon::from_boundaries(&[p(5.0, 3.0), p(15.0, 3.0)], &[p(5.0, 0.0), p(15.0, 0.0)]);
        assert!((polygon_iou(&a, &c, DEFAULT_IOU_RESOLUTION).iou - 1.0 / 3.0).abs() <= 0.02);
        let flat = LanePolygon::from_boundaries(&[p(0.0, 0.0)], &[p(1.0, 0.0)]);
        let d = polygon_iou(&a, &flat, DEFAULT_IOU_RESOLUTION);
        assert!(d.degenerate && d.iou == 0.0);
    }

    #[test]
    fn rings_even_odd() {
        let outer = rect(0.0, 0.0, 10.0, 10.0);
        let hole = rect(3.0, 3.0, 6.0, 6.0);
        let rings = vec![outer, hole];
        assert!(point_in_rings(p(1.0, 1.0), &rings));
        assert!(!point_in_rings(p(4.0, 4.0), &rings));
        assert!((distance_to_rings(p(4.0, 4.5), &rings) - 1.0).abs() < 1e-12);
    }

    fn pt() -> impl Strategy<Value = Point2> {
        (0.0..10.0f64, 0.0..10.0f64).prop_map(|(x, y)| p(x, y))
    }

    fn chain(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Point2>> {
        prop::collection::vec(pt(), n).prop_filter("distinct consecutive points", |v| {
            v.windows(2).all(|w| w[0].dist(w[1]) > 1e-3)
        })
    }

    /// Minimum distance between a query and the target by dense sampling of the target.
    fn dense_nearest(left: &[Point2], right: &[Point2], q: Query) -> f64 {
        let (qp, target) = match q.side {
            Side::Left => (left, right),
            Side::Right => (right, left),
        };
        let dist = |x: Point2| match q.kind {
            QueryKind::Vertex => x.dist(qp[q.index]),
            QueryKind::Segment => point_segment_distance(x, qp[q.index], qp[q.index + 1]),
        };
        let end = (target.len() - 1) as f64;
        let steps = (end * 1e4) as usize;
        (0..=steps)
            .map(|i| dist(eval_polyline(target, (i as f64 * 1e-4).min(end)).unwrap()))
            .fold(f64::INFINITY, f64::min)
    }

    /// Straightforward nearest distance: vertex against every segment, segment
    /// against every segment via crossing test and endpoint distances.
    fn direct_nearest(left: &[Point2], right: &[Point2], q: Query) -> f64 {
        let (qp, t) = match q.side {
            Side::Left => (left, right),
            Side::Right => (right, left),
        };
        if t.len() == 1 {
            return match q.kind {
                QueryKind::Vertex => qp[q.index].dist(t[0]),
                QueryKind::Segment => point_segment_distance(t[0], qp[q.index], qp[q.index + 1]),
            };
        }
        let mut best = f64::INFINITY;
        for w in t.windows(2) {
            let d = match q.kind {
                QueryKind::Vertex => point_segment_distance(qp[q.index], w[0], w[1]),
                QueryKind::Segment => {
                    let (a, b) = (qp[q.index], qp[q.index + 1]);
                    if segments_intersect(Segment::new(a, b), Segment::new(w[0], w[1])) {
                        0.0
                    } else {
                        point_segment_distance(a, w[0], w[1])
                            .min(point_segment_distance(b, w[0], w[1]))
                            .min(point_segment_distance(w[0], a, b))
                            .min(point_segment_distance(w[1], a, b))
                    }
                }
            };
            best = best.min(d);
        }
        best
    }

    /// Two roughly parallel rows with noise large enough to cause crossings.
    fn noisy_lane() -> impl Strategy<Value = (Vec<Point2>, Vec<Point2>)> {
        (3usize..6, 2usize..6, prop::collection::vec(-2.5..2.5f64, 24)).prop_map(|(n, m, e)| {
            let l = (0..n).map(|i| p(3.0 * i as f64 + e[2 * i], 3.0 + e[2 * i + 1])).collect();
            let r = (0..m).map(|i| p(3.0 * i as f64 + e[12 + 2 * i], e[13 + 2 * i])).collect();
            (l, r)
        })
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn nearest_matches_dense_sampling(l in chain(1..6), r in chain(1..6)) {
            for q in all_queries(l.len(), r.len()) {
                let ours = nearest_on_target(&l, &r, q);
                let dense = dense_nearest(&l, &r, q);
                prop_assert!(ours.distance <= dense + 1e-9);
                prop_assert!(dense - ours.distance < 1e-3, "{q:?}: {} vs {}", ours.distance, dense);
                prop_assert!((width_at(&l, &r, ours.param) - ours.distance).abs() < 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn eval_endpoints_exact(l in chain(1..6)) {
            prop_assert_eq!(eval_polyline(&l, 0.0).unwrap(), l[0]);
            prop_assert_eq!(eval_polyline(&l, (l.len() - 1) as f64).unwrap(), l[l.len() - 1]);
            for (i, &v) in l.iter().enumerate() {
                prop_assert_eq!(eval_polyline(&l, i as f64).unwrap(), v);
            }
        }

        #[test]
        fn matching_matches_direct_reimplementation(l in chain(1..5), r in chain(1..5)) {
            let m = compute_matching(&l, &r, MatchParam::default());
            let mut expect: Vec<MatchParam> = all_queries(l.len(), r.len())
                .into_iter()
                .map(|q| nearest_on_target(&l, &r, q).param)
                .collect();
            expect.sort();
            expect.dedup();
            prop_assert_eq!(&m, &expect);
            for q in all_queries(l.len(), r.len()) {
                let d = nearest_on_target(&l, &r, q).distance;
                prop_assert!((d - direct_nearest(&l, &r, q)).abs() < 1e-9);
            }
            prop_assert!(m.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(m.iter().all(|x| x.u <= (l.len() - 1) as f64 && x.v <= (r.len() - 1) as f64));
        }

        #[test]
        fn width_multiset_is_symmetric(l in chain(1..5), r in chain(1..5)) {
            let a = sorted(lane_widths(&l, &r, &compute_matching(&l, &r, MatchParam::default())));
            let mb = compute_matching(&r, &l, MatchParam::default());
            let b = sorted(lane_widths(&r, &l, &mb));
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn online_equals_batch(l in chain(1..8), r in chain(1..8), order in prop::collection::vec(any::<bool>(), 14)) {
            let (mut a, mut b) = (1, 1);
            let mut st = online_lane_width(&l[..1], &r[..1], &MatchingState::new()).unwrap();
            let mut k = 0;
            while a < l.len() || b < r.len() {
                let left = b == r.len() || (a < l.len() && order[k % order.len()]);
                k += 1;
                if left { a += 1 } else { b += 1 }
                let prev = st.clone();
                st = online_lane_width(&l[..a], &r[..b], &st).unwrap();
                let batch = compute_matching(&l[..a], &r[..b], MatchParam::default());
                prop_assert_eq!(st.all_params(), batch.clone());
                let bw = lane_widths(&l[..a], &r[..b], &batch);
                let ow = st.widths();
                for (x, y) in bw.iter().zip(&ow) {
                    prop_assert!((x - y).abs() < 1e-6);
                }
                let lines = st.lines();
                prop_assert_eq!(st.fixed().len() + st.mutable().len(), lines.len());
                // Query widths never increase as either boundary grows.
                for q in prev.queries() {
                    let now = st.queries().iter().find(|x| x.query == q.query).unwrap().width;
                    prop_assert!(now <= q.width + 1e-12);
                }
            }
        }

        #[test]
        fn query_widths_are_monotone(l in chain(2..8), r in chain(2..8), split in 1usize..7) {
            let a = split.min(l.len() - 1);
            let b = split.min(r.len() - 1);
            let small = MatchingState::from_batch(&l[..a], &r[..b]);
            let big = small.advance(&l, &r).unwrap();
            let min_small = small.queries().iter().map(|q| q.width).fold(f64::INFINITY, f64::min);
            let min_big = big.queries().iter().map(|q| q.width).fold(f64::INFINITY, f64::min);
            prop_assert!(min_big <= min_small + 1e-12);
            for q in small.queries() {
                let after = big.queries().iter().find(|x| x.query == q.query).unwrap();
                prop_assert!(after.width <= q.width + 1e-12);
            }
        }

        #[test]
        fn incremental_simplicity_matches_naive((l, r) in noisy_lane()) {
            let prev = LanePolygon::from_boundaries(&l[..l.len() - 1], &r);
            prop_assume!(polygon_simplicity_naive(&prev).is_simple());
            let poly = LanePolygon::from_boundaries(&l, &r);
            let n = l.len();
            let inc = polygon_is_simple_incremental(&poly, &[n - 2, n - 1]);
            prop_assert_eq!(inc, polygon_simplicity_naive(&poly));
        }

        #[test]
        fn full_incremental_equals_naive(l in chain(1..5), r in chain(1..5)) {
            let poly = LanePolygon::from_boundaries(&l, &r);
            let all: Vec<usize> = (0..poly.edge_count()).collect();
            prop_assert_eq!(polygon_is_simple_incremental(&poly, &all), polygon_simplicity_naive(&poly));
        }

        #[test]
        fn scanline_iou_equals_naive(a in chain(3..7), b in chain(3..7)) {
            let fast = region_iou(std::slice::from_ref(&a), std::slice::from_ref(&b), 0.25);
            let slow = region_iou_naive(std::slice::from_ref(&a), std::slice::from_ref(&b), 0.25);
            prop_assert_eq!(fast, slow);
            prop_assert!((0.0..=1.0).contains(&fast.iou));
        }

        #[test]
        fn iou_is_symmetric(x0 in 0.0..5.0f64, y0 in 0.0..5.0f64, w in 3.0..6.0f64, h in 3.0..6.0f64) {
            let a = rect(0.0, 0.0, 5.0, 5.0);
            let b = rect(x0, y0, x0 + w, y0 + h);
            let ab = region_iou(std::slice::from_ref(&a), std::slice::from_ref(&b), 0.1).iou;
            let ba = region_iou(std::slice::from_ref(&b), std::slice::from_ref(&a), 0.1).iou;
            prop_assert!((ab - ba).abs() < 1e-12);
            let inter = (5.0f64.min(x0 + w) - x0).max(0.0) * (5.0f64.min(y0 + h) - y0).max(0.0);
            let exact = inter / (25.0 + w * h - inter);
            prop_assert!((ab - exact).abs() < 0.03, "{ab} vs {exact}");
        }
    }
}
