//! Simultaneous depth-first enumeration of left/right path pairs.

use std::collections::HashSet;

use crate::geometry::{Point2, Side};
use crate::graph::{DetectionConfig, SearchGraph};

use super::constraints::{btd, LaneState};
use super::heuristics::{lrd, NvdMemo};
use super::{LaneCandidate, PathPair};

#[derive(Clone, Copy, Debug, Default)]
pub struct EppOptions {
    /// Record every expansion in [`EppResult::trace`].
    pub trace: bool,
}

/// One vertex push performed by the enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Expansion {
    /// Depth of the node the push leads to (root children have depth 1).
    pub depth: usize,
    pub side: Side,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, Default)]
pub struct EppResult {
    pub candidates: Vec<LaneCandidate>,
    pub iterations: u64,
    /// The whole search tree was explored within the budget.
    pub complete: bool,
    /// The raw candidate count exceeded the cap and was reduced to maximal pairs.
    pub reduced: bool,
    /// Pair the enumeration started from (the warmstart root, or the start vertices).
    pub root: PathPair,
    pub trace: Vec<Expansion>,
}

struct Ctx<'a> {
    graph: &'a SearchGraph,
    cfg: &'a DetectionConfig,
    heading: Point2,
    state: LaneState<'a>,
    owner: Vec<u8>,
    marks: [Vec<Vec<usize>>; 2],
    memo: NvdMemo,
    iterations: u64,
    truncated: bool,
    reduced: bool,
    candidates: Vec<LaneCandidate>,
    seen: HashSet<PathPair>,
    trace: Option<Vec<Expansion>>,
}

impl Ctx<'_> {
    fn next_vertex(&mut self, side: Side) -> Option<usize> {
        let cur = self.state.last(side);
        let prev = self.state.prev(side);
        let marked = &self.marks[side.index()][cur];
        let owner = &self.owner;
        self.memo
            .ranked(self.graph, prev, cur, self.heading)
            .iter()
            .copied()
            .find(|&u| owner[u] == 0 && !marked.contains(&u))
    }

    fn choose_side(&self, n0: usize, n1: usize) -> Side {
        if let Some(side) = self.state.status().forced_side() {
            return side;
        }
        lrd(
            self.state.points(Side::Left),
            self.state.points(Side::Right),
            self.graph.point(n0),
            self.graph.point(n1),
            self.heading,
        )
    }

    fn push(&mut self, side: Side, v: usize) {
        self.state.push(side, v);
        self.owner[v] = side.index() as u8 + 1;
    }

    fn pop(&mut self, side: Side) {
        let v = self.state.last(side);
        self.state.pop();
        self.owner[v] = 0;
    }

    fn record(&mut self) {
        let pair = PathPair {
            left: self.state.path(Side::Left).to_vec(),
            right: self.state.path(Side::Right).to_vec(),
        };
        if self.seen.contains(&pair) {
            return;
        }
        self.seen.insert(pair.clone());
        self.candidates.push(LaneCandidate {
            pair,
            closed: false,
            matching: self.state.matching(),
            constraint_ok: true,
            found_at_iteration: self.iterations,
        });
        if self.candidates.len() > self.cfg.max_candidates {
            reduce_to_maximal(&mut self.candidates);
            self.seen = self.candidates.iter().map(|c| c.pair.clone()).collect();
            self.reduced = true;
        }
    }

    fn enumerate(&mut self) {
        let cur = [self.state.last(Side::Left), self.state.last(Side::Right)];
        let mut added = [0usize; 2];
        loop {
            let next = [self.next_vertex(Side::Left), self.next_vertex(Side::Right)];
            if next == [None, None] {
                break;
            }
            if self.iterations >= self.cfg.it_max {
                self.truncated = true;
                break;
            }
            self.iterations += 1;
            let side = match next {
                [Some(a), Some(b)] => self.choose_side(a, b),
                [Some(_), None] => Side::Left,
                _ => Side::Right,
            };
            let v = next[side.index()].expect("chosen side has a vertex");
            self.push(side, v);
            self.marks[side.index()][cur[side.index()]].push(v);
            added[side.index()] += 1;
            if let Some(t) = &mut self.trace {
                t.push(Expansion { depth: self.state.depth(), side, from: cur[side.index()], to: v });
            }
            if self.state.cd() {
                self.record();
            }
            let has_unvisited = [next[0].is_some(), next[1].is_some()];
            if !btd(self.state.status(), Some(side), has_unvisited) {
                self.enumerate();
            }
            self.pop(side);
        }
        for s in Side::BOTH {
            let m = &mut self.marks[s.index()][cur[s.index()]];
            m.truncate(m.len() - added[s.index()]);
        }
    }
}

/// Keeps only candidates that no other candidate extends on both sides.
pub fn reduce_to_maximal(cands: &mut Vec<LaneCandidate>) {
    cands.sort_by(|a, b| a.pair.cmp(&b.pair));
    let n = cands.len();
    let mut keep = vec![true; n];
    for i in 0..n {
        let p = &cands[i].pair;
        // Candidates whose left path starts with p.left follow p in sorted order.
        for c in cands.iter().skip(i + 1) {
            if !c.pair.left.starts_with(&p.left) {
                break;
            }
            if c.pair.right.starts_with(&p.right) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut k = keep.into_iter();
    cands.retain(|_| k.next().unwrap_or(true));
}

/// Trims a seed so it starts at `start`, follows graph edges, is simple and
/// disjoint from `other`.
fn sanitize_side(graph: &SearchGraph, seed: &[usize], start: usize, forbidden: &HashSet<usize>) -> Vec<usize> {
    let from = seed.iter().position(|&v| v == start);
    let mut out = vec![start];
    if let Some(i) = from {
        let mut used: HashSet<usize> = HashSet::from([start]);
        for &v in &seed[i + 1..] {
            let last = *out.last().expect("nonempty");
            if v >= graph.vertex_count() || !graph.has_edge(last, v) || used.contains(&v) || forbidden.contains(&v) {
                break;
            }
            used.insert(v);
            out.push(v);
        }
    }
    out
}

/// Enumerates constraint-satisfying path pairs from `start`.
///
/// Without a seed the search starts from the two start vertices. A seed is
/// trimmed to begin at the start vertices, truncated at the first vertex that
/// breaks adjacency or simplicity, then shortened (longer side first, right on
/// ties) until it satisfies the constraints; the search then explores
/// extensions of that pair.
pub fn epp(
    graph: &SearchGraph,
    start: (usize, usize),
    heading: Point2,
    cfg: &DetectionConfig,
    seed: Option<&PathPair>,
) -> EppResult {
    epp_with(graph, start, heading, cfg, seed, EppOptions::default())
}

pub fn epp_with(
    graph: &SearchGraph,
    start: (usize, usize),
    heading: Point2,
    cfg: &DetectionConfig,
    seed: Option<&PathPair>,
    opts: EppOptions,
) -> EppResult {
    let n = graph.vertex_count();
    let mut ctx = Ctx {
        graph,
        cfg,
        heading,
        state: LaneState::new(graph.points(), cfg, start),
        owner: vec![0; n],
        marks: [vec![Vec::new(); n], vec![Vec::new(); n]],
        memo: NvdMemo::new(),
        iterations: 0,
        truncated: false,
        reduced: false,
        candidates: Vec::new(),
        seen: HashSet::new(),
        trace: opts.trace.then(Vec::new),
    };
    ctx.owner[start.0] = 1;
    ctx.owner[start.1] = 2;

    if let Some(seed) = seed {
        let left = sanitize_side(graph, &seed.left, start.0, &HashSet::from([start.1]));
        let left_set: HashSet<usize> = left.iter().copied().collect();
        let right = sanitize_side(graph, &seed.right, start.1, &left_set);
        let (mut i, mut j) = (1, 1);
        let mut pushed = Vec::new();
        while i < left.len() || j < right.len() {
            for (side, path, k) in [(Side::Left, &left, &mut i), (Side::Right, &right, &mut j)] {
                if *k < path.len() {
                    ctx.push(side, path[*k]);
                    pushed.push(side);
                    *k += 1;
                }
            }
            if ctx.state.status().dead() {
                break;
            }
        }
        while !ctx.state.cd() {
            match pushed.pop() {
                Some(side) => ctx.pop(side),
                None => break,
            }
        }
    }

    let root = PathPair {
        left: ctx.state.path(Side::Left).to_vec(),
        right: ctx.state.path(Side::Right).to_vec(),
    };
    if ctx.state.cd() {
        ctx.record();
    }
    ctx.enumerate();
    EppResult {
        candidates: ctx.candidates,
        iterations: ctx.iterations,
        complete: !ctx.truncated,
        reduced: ctx.reduced,
        root,
        trace: ctx.trace.unwrap_or_default(),
    }
}
