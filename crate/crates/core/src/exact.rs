//! Brute-force Gibbs distributions on tiny windows.
//!
//! States are encoded as bitmasks over the window's vertex pairs in
//! canonical order: bit `k` is set iff `window.edges()[k]` is present.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{check_beta, Error, Result};
use crate::model::{EnergyModel, Edge, GraphState, Window};

/// Default cap on the number of vertex pairs an enumeration may cover.
pub const DEFAULT_EDGE_LIMIT: usize = 24;

fn check_limit(edges: usize, limit: usize) -> Result<()> {
    // a u64 mask cannot address more than 63 edges regardless of the limit
    if edges > limit || edges > 63 {
        return Err(Error::WindowTooLarge { edges, limit: limit.min(63) });
    }
    Ok(())
}

/// The graph on `window` whose edge set is selected by `mask`.
pub fn state_from_mask(window: &Arc<Window>, edges: &[Edge], mask: u64) -> GraphState {
    let mut g = GraphState::empty(Arc::clone(window));
    for (k, &e) in edges.iter().enumerate() {
        if mask >> k & 1 == 1 {
            g.insert(e).expect("window edges lie in the window");
        }
    }
    g
}

/// Bitmask of `x` over `edges`; edges of `x` not listed are ignored.
pub fn mask_of(edges: &[Edge], x: &GraphState) -> u64 {
    edges
        .iter()
        .enumerate()
        .filter(|(_, &e)| x.contains(e))
        .fold(0, |m, (k, _)| m | 1 << k)
}

/// All `2^|E_V|` graphs on `window`, in bitmask order.
pub fn enumerate_states(window: &Window) -> Result<Vec<GraphState>> {
    enumerate_states_with_limit(window, DEFAULT_EDGE_LIMIT)
}

pub fn enumerate_states_with_limit(window: &Window, limit: usize) -> Result<Vec<GraphState>> {
    let edges = window.edges();
    check_limit(edges.len(), limit)?;
    let w = Arc::new(window.clone());
    Ok((0..1u64 << edges.len()).map(|m| state_from_mask(&w, &edges, m)).collect())
}

/// The finite-volume Gibbs distribution as an explicit table.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    window: Arc<Window>,
    beta: f64,
    model: EnergyModel,
    edges: Vec<Edge>,
    probabilities: Vec<f64>,
    energies: Vec<f64>,
    log_z: f64,
}

impl ExactDistribution {
    pub fn new(model: EnergyModel, window: &Window, beta: f64) -> Result<Self> {
        Self::with_limit(model, window, beta, DEFAULT_EDGE_LIMIT)
    }

    pub fn with_limit(model: EnergyModel, window: &Window, beta: f64, limit: usize) -> Result<Self> {
        check_beta(beta)?;
        let edges = window.edges();
        check_limit(edges.len(), limit)?;
        let w = Arc::new(window.clone());
        let energies: Vec<f64> = (0..1u64 << edges.len())
            .into_par_iter()
            .map(|m| model.hamiltonian(&state_from_mask(&w, &edges, m)))
            .collect();
        // shift by the ground energy so the weights never underflow to zero together
        let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = energies.par_iter().map(|&h| (-beta * (h - e_min)).exp()).collect();
        let total: f64 = weights.iter().sum();
        let probabilities = weights.into_iter().map(|x| x / total).collect();
        Ok(ExactDistribution {
            window: w,
            beta,
            model,
            edges,
            probabilities,
            energies,
            log_z: total.ln() - beta * e_min,
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn model(&self) -> EnergyModel {
        self.model
    }

    /// Vertex pairs in bit order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn probability(&self, mask: u64) -> f64 {
        self.probabilities[mask as usize]
    }

    pub fn probability_of(&self, x: &GraphState) -> f64 {
        self.probability(mask_of(&self.edges, x))
    }

    pub fn log_partition(&self) -> f64 {
        self.log_z
    }

    /// `Z_V(beta)`; may overflow for large windows, see [`Self::log_partition`].
    pub fn partition(&self) -> f64 {
        self.log_z.exp()
    }

    pub fn state(&self, mask: u64) -> GraphState {
        state_from_mask(&self.window, &self.edges, mask)
    }

    /// `mu(x_e = 1)` for every pair, in bit order.
    pub fn edge_marginals(&self) -> Vec<f64> {
        (0..self.edges.len())
            .map(|k| {
                self.probabilities
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| m >> k & 1 == 1)
                    .map(|(_, p)| p)
                    .sum()
            })
            .collect()
    }

    /// `mu f` for a function of the bitmask; cheaper than building states.
    pub fn expectation_by_mask(&self, f: impl Fn(u64) -> f64 + Sync) -> f64 {
        self.probabilities
            .par_iter()
            .enumerate()
            .map(|(m, p)| p * f(m as u64))
            .sum()
    }

    /// Writes `bitmask,probability,energy` rows.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "bitmask,probability,energy")?;
        for (m, (p, h)) in self.probabilities.iter().zip(&self.energies).enumerate() {
            writeln!(out, "{m},{p:e},{h}")?;
        }
        Ok(())
    }
}

pub fn exact_distribution(model: EnergyModel, window: &Window, beta: f64) -> Result<ExactDistribution> {
    ExactDistribution::new(model, window, beta)
}

/// `sum_x f(x) mu(x)`.
pub fn exact_expectation(d: &ExactDistribution, f: impl Fn(&GraphState) -> f64 + Sync) -> f64 {
    d.probabilities
        .par_iter()
        .enumerate()
        .map(|(m, p)| p * f(&d.state(m as u64)))
        .sum()
}

/// Largest `|mu(x^0) e^{-beta L - beta M} Q(e | x^0) - mu(x^1)|` over all
/// states and pairs of the window.
pub fn detailed_balance_residual(model: EnergyModel, window: &Window, beta: f64) -> Result<f64> {
    let d = ExactDistribution::new(model, window, beta)?;
    let n = d.edges.len();
    let residual = (0..1u64 << n)
        .into_par_iter()
        .map(|m| {
            let x = d.state(m);
            let mut worst: f64 = 0.0;
            for (k, &e) in d.edges.iter().enumerate() {
                if m >> k & 1 == 1 {
                    continue;
                }
                let q = model.acceptance_q(beta, &x, e).expect("window edge");
                let flow_in = d.probability(m) * model.birth_rate(beta, e) * q;
                let flow_out = d.probability(m | 1 << k);
                worst = worst.max((flow_in - flow_out).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    Ok(residual)
}

/// `1/2 sum |p - q|` over tables indexed by the same states.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch { left: p.len(), right: q.len() });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Relative frequency of each bitmask over `edges` among `samples`.
pub fn empirical_table<'a>(edges: &[Edge], samples: impl IntoIterator<Item = &'a GraphState>) -> Vec<f64> {
    let mut counts = vec![0u64; 1 << edges.len()];
    let mut n = 0u64;
    for x in samples {
        counts[mask_of(edges, x) as usize] += 1;
        n += 1;
    }
    counts.into_iter().map(|c| if n == 0 { 0.0 } else { c as f64 / n as f64 }).collect()
}

/// Same as [`empirical_table`] for masks already computed.
pub fn table_from_masks(n_edges: usize, masks: impl IntoIterator<Item = u64>) -> Vec<f64> {
    let mut counts = vec![0u64; 1 << n_edges];
    let mut n = 0u64;
    for m in masks {
        counts[m as usize] += 1;
        n += 1;
    }
    counts.into_iter().map(|c| if n == 0 { 0.0 } else { c as f64 / n as f64 }).collect()
}
