use std::collections::BTreeMap;

use rand::Rng;
use rand::distr::Open01;
use rand_distr::Exp1;
use serde::Serialize;

use crate::model::{rectangle_rate, Edge, GraphState};
use crate::rng::{edge_stream, tag, StreamRng};

/// A space-time atom: edge `basis` alive on `[birth, birth + lifetime)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rectangle {
    pub basis: Edge,
    pub birth: f64,
    pub lifetime: f64,
    pub mark: f64,
}

impl Rectangle {
    pub fn death(&self) -> f64 {
        self.birth + self.lifetime
    }

    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && t < self.death()
    }
}

pub(crate) fn draw_lifetime(rng: &mut StreamRng) -> f64 {
    rng.sample::<f64, _>(Exp1)
}

pub(crate) fn draw_mark(rng: &mut StreamRng) -> f64 {
    rng.sample::<f64, _>(Open01)
}

/// Lazily generated marked Poisson births on one edge.
///
/// Draw order on the edge's stream: the first gap when the stream is
/// created, then for each rectangle its lifetime, its mark, and the gap to
/// the next birth.
#[derive(Clone, Debug)]
pub struct RectangleStream {
    edge: Edge,
    rate: f64,
    rng: StreamRng,
    next_birth: f64,
}

impl RectangleStream {
    pub fn new(master: u64, edge: Edge, beta: f64, m: f64, t0: f64) -> Self {
        let rate = rectangle_rate(beta, m, edge.length());
        let mut rng = edge_stream(master, tag::BIRTHS, edge);
        let gap = draw_lifetime(&mut rng) / rate;
        RectangleStream { edge, rate, rng, next_birth: t0 + gap }
    }

    pub fn edge(&self) -> Edge {
        self.edge
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Birth time of the next rectangle (infinite if the rate underflows).
    pub fn peek(&self) -> f64 {
        self.next_birth
    }

    pub fn pop(&mut self) -> Rectangle {
        let lifetime = draw_lifetime(&mut self.rng);
        let mark = draw_mark(&mut self.rng);
        let r = Rectangle { basis: self.edge, birth: self.next_birth, lifetime, mark };
        self.next_birth += draw_lifetime(&mut self.rng) / self.rate;
        r
    }
}

/// All rectangles born in `[t0, t1)` on `edges`, sorted by birth time.
pub fn generate_rectangles(edges: &[Edge], beta: f64, m: f64, t0: f64, t1: f64, seed: u64) -> Vec<Rectangle> {
    let mut out = Vec::new();
    for &e in edges {
        let mut s = RectangleStream::new(seed, e, beta, m, t0);
        while s.peek() < t1 {
            out.push(s.pop());
        }
    }
    out.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.basis.cmp(&b.basis)));
    out
}

/// Draws the `k`-th initial rectangles on an edge; the first `n` draws of
/// a stream are the same whatever the total count requested.
pub(crate) struct InitialStream(StreamRng);

impl InitialStream {
    pub(crate) fn new(seed: u64, e: Edge) -> Self {
        InitialStream(edge_stream(seed, tag::INITIAL, e))
    }

    pub(crate) fn next(&mut self, e: Edge, birth: f64) -> Rectangle {
        let lifetime = draw_lifetime(&mut self.0);
        let mark = draw_mark(&mut self.0);
        Rectangle { basis: e, birth, lifetime, mark }
    }
}

/// One birth-0 rectangle per edge of `x`.
pub fn initial_rectangles(x: &GraphState, seed: u64) -> Vec<Rectangle> {
    x.edges().map(|e| InitialStream::new(seed, e).next(e, 0.0)).collect()
}

/// Edge multiplicities of the free process.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MultigraphState {
    counts: BTreeMap<Edge, u32>,
}

impl MultigraphState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_graph(x: &GraphState) -> Self {
        MultigraphState { counts: x.edges().map(|e| (e, 1)).collect() }
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (Edge, u32)>) -> Self {
        MultigraphState { counts: counts.into_iter().filter(|&(_, c)| c > 0).collect() }
    }

    pub fn count(&self, e: Edge) -> u32 {
        self.counts.get(&e).copied().unwrap_or(0)
    }

    pub fn increment(&mut self, e: Edge) {
        *self.counts.entry(e).or_insert(0) += 1;
    }

    /// Removes one copy of `e`; returns false if there was none.
    pub fn decrement(&mut self, e: Edge) -> bool {
        match self.counts.get_mut(&e) {
            Some(c) if *c > 1 => {
                *c -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(&e);
                true
            }
            None => false,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, u32)> + '_ {
        self.counts.iter().map(|(&e, &c)| (e, c))
    }

    /// Whether `x_e <= count(e)` for every edge.
    pub fn dominates(&self, x: &GraphState) -> bool {
        x.edges().all(|e| self.count(e) >= 1)
    }
}
