use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use super::rectangle::{InitialStream, MultigraphState, Rectangle, RectangleStream};
use crate::error::{check_beta, invalid, Error, Result};
use crate::model::{EnergyModel, Edge, GraphState, Window};

/// Largest horizon accepted by the simulators.
pub const MAX_HORIZON: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Birth,
    Death,
}

/// One processed event.
///
/// For a birth, `accepted` says whether the dependent process kept the
/// rectangle; for a death, whether the dying rectangle had been kept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EventRecord {
    pub time: f64,
    pub kind: EventKind,
    pub rectangle: Rectangle,
    pub accepted: bool,
}

#[derive(Clone, Copy, Debug)]
struct Pending {
    time: f64,
    edge: usize,
    kind: EventKind,
    seq: u64,
    rect: Option<(Rectangle, bool)>,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    // reversed: BinaryHeap is a max-heap and we want the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.edge.cmp(&self.edge))
            .then(other.kind.cmp(&self.kind))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Event-driven joint simulation of the free process and, optionally, the
/// dependent process obtained from it by the kept/erased rule.
///
/// Both processes read the same rectangles; initial rectangles of edges
/// present in both initial states are shared.
pub struct Engine {
    beta: f64,
    model: Option<EnergyModel>,
    edges: Vec<Edge>,
    streams: Vec<RectangleStream>,
    heap: BinaryHeap<Pending>,
    seq: u64,
    time: f64,
    free: MultigraphState,
    state: GraphState,
    events: u64,
    violations: u64,
    record_kept: bool,
    kept: Vec<Rectangle>,
}

impl Engine {
    /// Engine for the free process with birth rates `e^{-beta L - beta m}`.
    pub fn free(window: &Window, beta: f64, m: f64, z0: &MultigraphState, seed: u64) -> Result<Self> {
        let empty = GraphState::empty(window.clone());
        Self::build(window, beta, m, None, &empty, z0, seed)
    }

    /// Engine for the dependent process started at `x0`, coupled with the
    /// free process started at `z0 >= x0`.
    pub fn coupled(
        model: EnergyModel,
        window: &Window,
        beta: f64,
        x0: &GraphState,
        z0: &MultigraphState,
        seed: u64,
    ) -> Result<Self> {
        Self::build(window, beta, model.constant_m(), Some(model), x0, z0, seed)
    }

    /// Dependent process started at `x0`, with the free process started at
    /// the same configuration.
    pub fn dependent(model: EnergyModel, window: &Window, beta: f64, x0: &GraphState, seed: u64) -> Result<Self> {
        Self::coupled(model, window, beta, x0, &MultigraphState::from_graph(x0), seed)
    }

    fn build(
        window: &Window,
        beta: f64,
        m: f64,
        model: Option<EnergyModel>,
        x0: &GraphState,
        z0: &MultigraphState,
        seed: u64,
    ) -> Result<Self> {
        check_beta(beta)?;
        if !m.is_finite() {
            return Err(invalid("M", format!("must be finite, got {m}")));
        }
        if x0.window() != window {
            return Err(invalid("x0", "initial state lives on a different window"));
        }
        if !z0.dominates(x0) {
            return Err(invalid("z0", "initial free state must dominate the dependent one"));
        }
        let edges = window.edges();
        for (e, _) in z0.iter() {
            if !window.contains_edge(e) {
                return Err(Error::EdgeOutsideWindow(e));
            }
        }
        let streams: Vec<RectangleStream> =
            edges.iter().map(|&e| RectangleStream::new(seed, e, beta, m, 0.0)).collect();
        let mut engine = Engine {
            beta,
            model,
            edges,
            streams,
            heap: BinaryHeap::new(),
            seq: 0,
            time: 0.0,
            free: z0.clone(),
            state: x0.clone(),
            events: 0,
            violations: 0,
            record_kept: false,
            kept: Vec::new(),
        };
        for k in 0..engine.edges.len() {
            let e = engine.edges[k];
            let copies = z0.count(e);
            if copies > 0 {
                let mut init = InitialStream::new(seed, e);
                for c in 0..copies {
                    let r = init.next(e, 0.0);
                    let kept = c == 0 && model.is_some() && x0.contains(e);
                    if kept {
                        engine.kept.push(r);
                    }
                    engine.push_death(k, r, kept);
                }
            }
            let t = engine.streams[k].peek();
            engine.push(Pending { time: t, edge: k, kind: EventKind::Birth, seq: 0, rect: None });
        }
        Ok(engine)
    }

    fn push(&mut self, mut p: Pending) {
        if p.time.is_finite() {
            self.seq += 1;
            p.seq = self.seq;
            self.heap.push(p);
        }
    }

    fn push_death(&mut self, edge: usize, r: Rectangle, kept: bool) {
        self.push(Pending { time: r.death(), edge, kind: EventKind::Death, seq: 0, rect: Some((r, kept)) });
    }

    /// Keep every kept rectangle for [`Engine::kept`].
    pub fn record_kept(&mut self, on: bool) {
        self.record_kept = on;
        if !on {
            self.kept.clear();
        }
    }

    pub fn kept(&self) -> &[Rectangle] {
        &self.kept
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn state(&self) -> &GraphState {
        &self.state
    }

    pub fn free_state(&self) -> &MultigraphState {
        &self.free
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    /// Events after which the dependent state was not dominated.
    pub fn violations(&self) -> u64 {
        self.violations
    }

    pub fn next_event_time(&self) -> f64 {
        self.heap.peek().map_or(f64::INFINITY, |p| p.time)
    }

    /// Processes the next event if it happens strictly before `until`.
    pub fn step(&mut self, until: f64) -> Option<EventRecord> {
        if self.next_event_time() >= until {
            return None;
        }
        let p = self.heap.pop()?;
        self.time = p.time;
        self.events += 1;
        let e = self.edges[p.edge];
        let record = match p.kind {
            EventKind::Birth => {
                let r = self.streams[p.edge].pop();
                let next = self.streams[p.edge].peek();
                self.push(Pending { time: next, edge: p.edge, kind: EventKind::Birth, seq: 0, rect: None });
                self.free.increment(e);
                let accepted = match self.model {
                    Some(model) if !self.state.contains(e) => {
                        let q = model.acceptance_q(self.beta, &self.state, e).expect("window edge");
                        r.mark < q
                    }
                    _ => false,
                };
                if accepted {
                    self.state.insert(e).expect("window edge");
                    if self.record_kept {
                        self.kept.push(r);
                    }
                }
                self.push_death(p.edge, r, accepted);
                EventRecord { time: p.time, kind: EventKind::Birth, rectangle: r, accepted }
            }
            EventKind::Death => {
                let (r, kept) = p.rect.expect("death carries its rectangle");
                self.free.decrement(e);
                if kept {
                    self.state.remove(e);
                }
                EventRecord { time: p.time, kind: EventKind::Death, rectangle: r, accepted: kept }
            }
        };
        if self.state.contains(e) && self.free.count(e) == 0 {
            self.violations += 1;
        }
        Some(record)
    }

    /// Runs to time `t`, handing every event to `observe`.
    pub fn run_until(&mut self, t: f64, mut observe: impl FnMut(&EventRecord, &Engine)) -> Result<()> {
        check_horizon(t)?;
        while let Some(rec) = self.step(t) {
            observe(&rec, self);
        }
        self.time = self.time.max(t);
        Ok(())
    }
}

fn check_horizon(t: f64) -> Result<()> {
    if !(t >= 0.0 && t <= MAX_HORIZON) {
        return Err(invalid("horizon", format!("must lie in [0, {MAX_HORIZON:e}], got {t}")));
    }
    Ok(())
}

/// Free process started at `z0` and observed at time `t`.
pub fn simulate_free(
    window: &Window,
    beta: f64,
    m: f64,
    z0: &MultigraphState,
    t: f64,
    seed: u64,
) -> Result<MultigraphState> {
    let mut engine = Engine::free(window, beta, m, z0, seed)?;
    engine.run_until(t, |_, _| {})?;
    Ok(engine.free)
}

/// Dependent process at time `t` together with every rectangle it kept.
pub fn simulate_dependent(
    model: EnergyModel,
    window: &Window,
    beta: f64,
    x0: &GraphState,
    t: f64,
    seed: u64,
) -> Result<(GraphState, Vec<Rectangle>)> {
    let mut engine = Engine::dependent(model, window, beta, x0, seed)?;
    engine.record_kept(true);
    engine.run_until(t, |_, _| {})?;
    Ok((engine.state, engine.kept))
}

#[derive(Clone, Debug)]
pub struct CoupledRun {
    pub dependent: GraphState,
    pub free: MultigraphState,
    pub events: u64,
    pub violations: u64,
}

/// Runs the coupled pair to time `t`, checking domination after every event.
pub fn coupled_run(
    model: EnergyModel,
    window: &Window,
    beta: f64,
    x0: &GraphState,
    z0: &MultigraphState,
    t: f64,
    seed: u64,
) -> Result<CoupledRun> {
    let mut engine = Engine::coupled(model, window, beta, x0, z0, seed)?;
    engine.run_until(t, |_, _| {})?;
    Ok(CoupledRun {
        events: engine.events,
        violations: engine.violations,
        dependent: engine.state,
        free: engine.free,
    })
}

/// Runs the coupled pair until `events` events have been processed.
pub fn coupled_run_events(
    model: EnergyModel,
    window: &Window,
    beta: f64,
    x0: &GraphState,
    z0: &MultigraphState,
    events: u64,
    seed: u64,
) -> Result<CoupledRun> {
    let mut engine = Engine::coupled(model, window, beta, x0, z0, seed)?;
    while engine.events < events && engine.step(MAX_HORIZON).is_some() {}
    Ok(CoupledRun {
        events: engine.events,
        violations: engine.violations,
        dependent: engine.state,
        free: engine.free,
    })
}

/// Time average with a batch-means standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub batches: usize,
}

pub const DEFAULT_BATCHES: usize = 100;

/// Time average of `f` along the dependent path on `(burn, horizon]`,
/// started from the empty graph.
pub fn ergodic_average(
    model: EnergyModel,
    window: &Window,
    beta: f64,
    f: impl Fn(&GraphState) -> f64,
    burn: f64,
    horizon: f64,
    seed: u64,
) -> Result<Estimate> {
    ergodic_average_batches(model, window, beta, f, burn, horizon, DEFAULT_BATCHES, seed)
}

#[allow(clippy::too_many_arguments)]
pub fn ergodic_average_batches(
    model: EnergyModel,
    window: &Window,
    beta: f64,
    f: impl Fn(&GraphState) -> f64,
    burn: f64,
    horizon: f64,
    batches: usize,
    seed: u64,
) -> Result<Estimate> {
    check_horizon(horizon)?;
    if !(burn >= 0.0 && horizon > burn) {
        return Err(invalid("burn", format!("need 0 <= burn < horizon, got burn={burn}, horizon={horizon}")));
    }
    if batches < 2 {
        return Err(invalid("batches", "need at least two batches"));
    }
    let x0 = GraphState::empty(Arc::new(window.clone()));
    let mut engine = Engine::dependent(model, window, beta, &x0, seed)?;
    engine.run_until(burn, |_, _| {})?;

    let width = (horizon - burn) / batches as f64;
    let mut sums = vec![0.0; batches];
    let mut value = f(engine.state());
    let mut last = burn;
    // spread value * (t1 - t0) over the batches the segment overlaps
    let accumulate = |t0: f64, t1: f64, value: f64, sums: &mut [f64]| {
        let mut a = t0;
        let mut k = (((a - burn) / width) as usize).min(batches - 1);
        while a < t1 {
            let end = if k + 1 >= batches { t1 } else { (burn + (k + 1) as f64 * width).min(t1) };
            if end > a {
                sums[k] += value * (end - a);
                a = end;
            }
            k += 1;
        }
    };
    while let Some(rec) = engine.step(horizon) {
        accumulate(last, rec.time, value, &mut sums);
        last = rec.time;
        value = f(engine.state());
    }
    accumulate(last, horizon, value, &mut sums);

    let means: Vec<f64> = sums.iter().map(|s| s / width).collect();
    let mean = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    Ok(Estimate { mean, std_error: (var / batches as f64).sqrt(), batches })
}

/// Writes `time,kind,x1,y1,x2,y2,mark,accepted` rows.
pub fn write_trace<'a>(records: impl IntoIterator<Item = &'a EventRecord>, mut out: impl Write) -> Result<()> {
    writeln!(out, "time,kind,x1,y1,x2,y2,mark,accepted")?;
    for r in records {
        let (a, b) = r.rectangle.basis.endpoints();
        let kind = match r.kind {
            EventKind::Birth => "birth",
            EventKind::Death => "death",
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.time, kind, a.x, a.y, b.x, b.y, r.rectangle.mark, r.accepted as u8
        )?;
    }
    Ok(())
}
