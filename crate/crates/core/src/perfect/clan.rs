//! Backward construction of the clan of ancestors.
//!
//! Depth `u >= 0` is backward time: a rectangle found at depth `u` is born
//! at `-u`. The potential ancestors are never enumerated. Instead every
//! vertex `v` that is either in the origin window or an endpoint of a clan
//! member is a *source* with threshold
//!
//! `tau(v) = min({0 if v in V} U {birth(R) : R in clan, v in basis(R)})`,
//!
//! and proposes rectangles on edges `{v, w}` born at depth `u` whose
//! lifetime reaches `tau(v)`. Such rectangles arrive with intensity
//! `e^{-beta L(v,w) - beta M} e^{-(u + tau(v))}`; summed over `w` this is
//! `(alpha / 2) e^{-(u + tau(v))}`, and the partner `w` is at distance
//! `s` with probability proportional to `4 s e^{-beta s}`, i.e.
//! `s - 1` is a sum of two geometric variables.
//!
//! An edge relates to the clan through both of its endpoints, so its true
//! threshold is the smaller of their two. A proposal is therefore kept
//! only when it comes from the endpoint with the smaller threshold, which
//! thins the superposition of the two sources down to the single correct
//! intensity. Lifetimes are the deterministic part `u + tau` plus a fresh
//! mean-one exponential.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::io::Write;

use rand::Rng;
use rand_distr::{Exp1, Geometric, Open01};
use serde::Serialize;

use crate::analysis::{check_subcritical, vertex_rate};
use crate::error::{check_beta, invalid, Error, ExplosionStats, Result};
use crate::forward::Rectangle;
use crate::model::{rectangle_rate, shell_point, Edge, Vertex, Window};

/// What the clan is the clan of.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Rectangles whose basis meets the window and which are alive at 0.
    Window(Window),
    /// Rectangles with this basis alive at 0.
    Edge(Edge),
}

impl Origin {
    pub fn vertex(v: Vertex) -> Self {
        Origin::Window(Window::from_vertices([v]).expect("one vertex"))
    }

    fn touches(&self, e: Edge) -> bool {
        match self {
            Origin::Window(w) => {
                let (a, b) = e.endpoints();
                w.contains(a) || w.contains(b)
            }
            Origin::Edge(f) => *f == e,
        }
    }

    /// Lattice distance from the origin to the basis `e`.
    pub fn distance(&self, e: Edge) -> u64 {
        let (a, b) = e.endpoints();
        match self {
            Origin::Window(w) => w.vertices().map(|v| v.l1(a).min(v.l1(b))).min().unwrap_or(0),
            Origin::Edge(f) => {
                let (c, d) = f.endpoints();
                [c.l1(a), c.l1(b), d.l1(a), d.l1(b)].into_iter().min().unwrap_or(0)
            }
        }
    }
}

/// Where rectangles live: all of `Z^2`, or only edges inside a finite set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Domain {
    #[default]
    Infinite,
    Finite(Window),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Caps {
    pub max_rectangles: usize,
    pub max_time_depth: f64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_rectangles: 1_000_000, max_time_depth: 1e4 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ClanOptions {
    pub caps: Caps,
    pub domain: Domain,
    /// Skip the `alpha(beta) < 1` check; the construction may then blow a cap.
    pub allow_supercritical: bool,
}

/// A finite clan of ancestors, in the order the backward construction
/// found it (strictly decreasing birth times).
#[derive(Clone, Debug)]
pub struct Clan {
    origin: Origin,
    rectangles: Vec<Rectangle>,
    generations: Vec<u32>,
    proposals: u64,
}

impl Clan {
    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn rectangles(&self) -> &[Rectangle] {
        &self.rectangles
    }

    /// Generation of each rectangle: 1 for rectangles alive at 0 on the
    /// origin, otherwise one more than the youngest generation it is an
    /// ancestor of.
    pub fn generations(&self) -> &[u32] {
        &self.generations
    }

    pub fn len(&self) -> usize {
        self.rectangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rectangles.is_empty()
    }

    /// Proposals drawn, accepted or not.
    pub fn proposals(&self) -> u64 {
        self.proposals
    }

    /// Largest distance between the origin and a basis in the clan; 0 for
    /// an empty clan.
    pub fn space_diameter(&self) -> u64 {
        self.rectangles.iter().map(|r| self.origin.distance(r.basis)).max().unwrap_or(0)
    }

    /// How far back the clan reaches: minus the earliest birth.
    pub fn time_length(&self) -> f64 {
        self.rectangles.iter().map(|r| -r.birth).fold(0.0, f64::max)
    }

    /// Indices of rectangles that neither live to time 0 on the origin nor
    /// reach the birth of a related younger member.
    pub fn closure_violations(&self) -> Vec<usize> {
        let (_, orphans) = generations(&self.origin, &self.rectangles);
        orphans
    }

    pub fn write_csv(&self, kept: Option<&[bool]>, mut out: impl Write) -> Result<()> {
        writeln!(out, "gen,x1,y1,x2,y2,birth,lifetime,mark,kept")?;
        for (k, r) in self.rectangles.iter().enumerate() {
            let (a, b) = r.basis.endpoints();
            let flag = kept.map_or(String::new(), |f| (f[k] as u8).to_string());
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.generations[k], a.x, a.y, b.x, b.y, r.birth, r.lifetime, r.mark, flag
            )?;
        }
        Ok(())
    }
}

/// `min{birth(R) : R in rectangles, basis(R) ~ e}`, with `min of nothing = 0`.
pub fn ti(rectangles: &[Rectangle], e: Edge) -> f64 {
    rectangles
        .iter()
        .filter(|r| r.basis.relates(e))
        .map(|r| r.birth)
        .fold(0.0, f64::min)
}

/// Whether two edges share a vertex.
pub fn relates(e1: Edge, e2: Edge) -> bool {
    e1.relates(e2)
}

fn generations(origin: &Origin, rects: &[Rectangle]) -> (Vec<u32>, Vec<usize>) {
    let mut gens = vec![0u32; rects.len()];
    let mut orphans = Vec::new();
    let mut by_vertex: HashMap<Vertex, Vec<usize>> = HashMap::new();
    for (k, r) in rects.iter().enumerate() {
        let mut best = if origin.touches(r.basis) && r.death() > 0.0 { 1 } else { u32::MAX };
        let (a, b) = r.basis.endpoints();
        for v in [a, b] {
            for &j in by_vertex.get(&v).map_or(&[][..], Vec::as_slice) {
                let younger = &rects[j];
                if younger.birth > r.birth && r.death() > younger.birth {
                    best = best.min(gens[j].saturating_add(1));
                }
            }
        }
        if best == u32::MAX {
            orphans.push(k);
        }
        gens[k] = best;
        by_vertex.entry(a).or_default().push(k);
        by_vertex.entry(b).or_default().push(k);
    }
    (gens, orphans)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum SourceId {
    OriginEdge,
    Vertex(Vertex),
}

#[derive(Clone, Copy, Debug)]
struct Source {
    tau: f64,
    version: u32,
}

#[derive(Clone, Copy, Debug)]
struct Proposal {
    depth: f64,
    source: SourceId,
    version: u32,
}

impl PartialEq for Proposal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Proposal {}

impl PartialOrd for Proposal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Proposal {
    // min-heap on depth
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .depth
            .total_cmp(&self.depth)
            .then(other.source.cmp(&self.source))
            .then(other.version.cmp(&self.version))
    }
}

struct Builder<'a, R: Rng> {
    rng: &'a mut R,
    beta: f64,
    m: f64,
    vertex_rate: f64,
    shell_p: Geometric,
    origin_edge: Option<(Edge, Source)>,
    sources: HashMap<Vertex, Source>,
    heap: BinaryHeap<Proposal>,
    proposals: u64,
}

impl<R: Rng> Builder<'_, R> {
    fn source(&self, id: SourceId) -> Source {
        match id {
            SourceId::OriginEdge => self.origin_edge.expect("origin edge source").1,
            SourceId::Vertex(v) => self.sources[&v],
        }
    }

    fn rate(&self, id: SourceId) -> f64 {
        match id {
            SourceId::OriginEdge => {
                let e = self.origin_edge.expect("origin edge source").0;
                rectangle_rate(self.beta, self.m, e.length())
            }
            SourceId::Vertex(_) => self.vertex_rate,
        }
    }

    /// Schedules the next proposal of `id` after depth `u0`, if any.
    fn schedule(&mut self, id: SourceId, u0: f64) {
        let s = self.source(id);
        // remaining mass of the intensity rate * e^{-(u + tau)} on (u0, inf)
        let mass = self.rate(id) * (-(s.tau + u0)).exp();
        let draw: f64 = self.rng.sample(Exp1);
        if draw < mass {
            let depth = u0 - (-draw / mass).ln_1p();
            self.heap.push(Proposal { depth, source: id, version: s.version });
        }
    }

    /// Lowers the threshold of `v` to `tau` and restarts it at depth `u0`.
    fn lower(&mut self, v: Vertex, tau: f64, u0: f64) {
        let s = self.sources.entry(v).or_insert(Source { tau, version: 0 });
        s.tau = s.tau.min(tau);
        s.version += 1;
        self.schedule(SourceId::Vertex(v), u0);
    }

    /// Source responsible for edge `e`: smallest threshold, ties to the
    /// origin edge and then to the smaller vertex.
    fn owner(&self, e: Edge) -> (f64, SourceId) {
        let (a, b) = e.endpoints();
        let mut best: Option<(f64, SourceId)> = None;
        let mut consider = |tau: f64, id: SourceId| {
            let better = match best {
                None => true,
                Some((t, i)) => tau.total_cmp(&t).then(id.cmp(&i)) == Ordering::Less,
            };
            if better {
                best = Some((tau, id));
            }
        };
        if let Some((f, s)) = self.origin_edge {
            if f == e {
                consider(s.tau, SourceId::OriginEdge);
            }
        }
        for v in [a, b] {
            if let Some(s) = self.sources.get(&v) {
                consider(s.tau, SourceId::Vertex(v));
            }
        }
        best.expect("a proposing source covers its edge")
    }

    fn propose_edge(&mut self, id: SourceId) -> Edge {
        match id {
            SourceId::OriginEdge => self.origin_edge.expect("origin edge source").0,
            SourceId::Vertex(v) => {
                let s = 1 + self.rng.sample(self.shell_p) + self.rng.sample(self.shell_p);
                let k = self.rng.random_range(0..4 * s);
                Edge::new(v, shell_point(v, s, k)).expect("shell points differ from the centre")
            }
        }
    }
}

/// Builds the clan of `origin` at time 0 with rectangle rates
/// `e^{-beta L - beta M}`.
pub fn sample_backward_clan<R: Rng>(
    origin: &Origin,
    beta: f64,
    m: f64,
    rng: &mut R,
    options: &ClanOptions,
) -> Result<Clan> {
    check_beta(beta)?;
    if !options.allow_supercritical {
        check_subcritical(beta, m)?;
    }
    let caps = options.caps;
    if caps.max_rectangles == 0 || !(caps.max_time_depth > 0.0) {
        return Err(invalid("caps", "caps must be positive"));
    }
    if let Domain::Finite(b) = &options.domain {
        let inside = match origin {
            Origin::Window(w) => w.is_subset_of(b),
            Origin::Edge(e) => b.contains_edge(*e),
        };
        if !inside {
            return Err(invalid("domain", "origin must lie inside the sampling domain"));
        }
    }
    let shell_p = Geometric::new(-(-beta).exp_m1()).map_err(|e| invalid("beta", e.to_string()))?;
    let mut b = Builder {
        rng,
        beta,
        m,
        vertex_rate: vertex_rate(beta, m)?,
        shell_p,
        origin_edge: None,
        sources: HashMap::new(),
        heap: BinaryHeap::new(),
        proposals: 0,
    };
    match origin {
        Origin::Window(w) => {
            for v in w.vertices() {
                b.lower(v, 0.0, 0.0);
            }
        }
        Origin::Edge(e) => {
            b.origin_edge = Some((*e, Source { tau: 0.0, version: 0 }));
            b.schedule(SourceId::OriginEdge, 0.0);
        }
    }

    let mut rects: Vec<Rectangle> = Vec::new();
    while let Some(p) = b.heap.pop() {
        let live = match p.source {
            SourceId::OriginEdge => b.origin_edge.is_some_and(|(_, s)| s.version == p.version),
            SourceId::Vertex(v) => b.sources[&v].version == p.version,
        };
        if !live {
            continue;
        }
        b.proposals += 1;
        let u = p.depth;
        if u > caps.max_time_depth {
            return Err(explosion("max_time_depth", rects.len(), b.proposals, u));
        }
        let e = b.propose_edge(p.source);
        let in_domain = match &options.domain {
            Domain::Infinite => true,
            Domain::Finite(d) => d.contains_edge(e),
        };
        let (tau, owner) = b.owner(e);
        if !in_domain || owner != p.source {
            b.schedule(p.source, u);
            continue;
        }
        if rects.len() >= caps.max_rectangles {
            return Err(explosion("max_rectangles", rects.len(), b.proposals, u));
        }
        let extra: f64 = b.rng.sample(Exp1);
        let mark: f64 = b.rng.sample(Open01);
        rects.push(Rectangle { basis: e, birth: -u, lifetime: (u + tau) + extra, mark });
        // the new member covers both endpoints more leniently than anything
        // before it, so the origin edge source can never own an edge again
        b.origin_edge = None;
        let (x, y) = e.endpoints();
        b.lower(x, -u, u);
        b.lower(y, -u, u);
    }

    let (generations, orphans) = generations(origin, &rects);
    debug_assert!(orphans.is_empty(), "clan closure violated at {orphans:?}");
    Ok(Clan { origin: origin.clone(), rectangles: rects, generations, proposals: b.proposals })
}

fn explosion(cap: &'static str, rectangles: usize, proposals: u64, depth: f64) -> Error {
    Error::ClanExplosion { cap, stats: ExplosionStats { rectangles, proposals, depth } }
}
