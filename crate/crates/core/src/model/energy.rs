//! Hamiltonians `H_V(x) = sum of edge lengths + F_V(x)` and their local
//! differences `F(x^1_e) - F(x^0_e)`.

use std::fmt;

use serde::Serialize;

use super::graph::GraphState;
use super::lattice::{Edge, Vertex};
use crate::error::{invalid, Error, Result};

/// Degree penalty: `h0` per isolated vertex, `h1 * C(d, 2)` for degree `d >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FerrariParams {
    h0: f64,
    h1: f64,
}

impl FerrariParams {
    /// Requires `0 < h0 < h1` and `h0 < 1/2` (so that `M = -2 h0 > -1`).
    pub fn new(h0: f64, h1: f64) -> Result<Self> {
        if !(h0.is_finite() && h1.is_finite() && h0 > 0.0 && h0 < h1) {
            return Err(invalid("h0/h1", format!("need 0 < h0 < h1, got h0={h0}, h1={h1}")));
        }
        if h0 >= 0.5 {
            return Err(invalid(
                "h0",
                format!("h0 = {h0} gives M = {} <= -1; need h0 < 1/2", -2.0 * h0),
            ));
        }
        Ok(FerrariParams { h0, h1 })
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    fn phi(&self, degree: usize) -> f64 {
        match degree {
            0 => self.h0,
            1 => 0.0,
            d => self.h1 * (d * (d - 1) / 2) as f64,
        }
    }

    fn phi_increment(&self, degree_without: usize) -> f64 {
        self.phi(degree_without + 1) - self.phi(degree_without)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnergyModel {
    /// `F = 0`: edges are independent.
    #[serde(rename = "edge")]
    EdgeOnly,
    Ferrari(FerrariParams),
    /// Length-weighted 2-star penalty,
    /// `F = 1/2 sum_v sum_{a<b in N(v)} L(v,a) L(v,b)`.
    TwoStar,
}

impl fmt::Display for EnergyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyModel::EdgeOnly => write!(f, "edge"),
            EnergyModel::Ferrari(p) => write!(f, "ferrari(h0={}, h1={})", p.h0, p.h1),
            EnergyModel::TwoStar => write!(f, "twostar"),
        }
    }
}

impl EnergyModel {
    pub fn ferrari(h0: f64, h1: f64) -> Result<Self> {
        FerrariParams::new(h0, h1).map(EnergyModel::Ferrari)
    }

    /// `F_V(x)`.
    pub fn sufficient_statistic(&self, x: &GraphState) -> f64 {
        match self {
            EnergyModel::EdgeOnly => 0.0,
            EnergyModel::Ferrari(p) => x.window().vertices().map(|v| p.phi(x.degree(v))).sum(),
            EnergyModel::TwoStar => {
                let mut total = 0.0;
                for v in x.window().vertices() {
                    let lens: Vec<f64> = x.neighbors(v).iter().map(|&w| v.l1(w) as f64).collect();
                    for (k, a) in lens.iter().enumerate() {
                        for b in &lens[k + 1..] {
                            total += a * b;
                        }
                    }
                }
                0.5 * total
            }
        }
    }

    /// `H_V(x)`.
    pub fn hamiltonian(&self, x: &GraphState) -> f64 {
        x.total_length() as f64 + self.sufficient_statistic(x)
    }

    /// `F(x^1_e) - F(x^0_e)`; independent of whether `e` is present in `x`.
    pub fn local_difference(&self, x: &GraphState, e: Edge) -> Result<f64> {
        if !x.window().contains_edge(e) {
            return Err(Error::EdgeOutsideWindow(e));
        }
        let (a, b) = e.endpoints();
        let na: Vec<Vertex> = x.neighbors(a).iter().copied().filter(|&w| w != b).collect();
        let nb: Vec<Vertex> = x.neighbors(b).iter().copied().filter(|&w| w != a).collect();
        Ok(self.delta_from_neighbors(e, &na, &nb))
    }

    /// Local difference for `e = {a, b}` given the neighbors of `a` other
    /// than `b` and the neighbors of `b` other than `a`.
    pub fn delta_from_neighbors(&self, e: Edge, neighbors_a: &[Vertex], neighbors_b: &[Vertex]) -> f64 {
        match self {
            EnergyModel::EdgeOnly => 0.0,
            EnergyModel::Ferrari(p) => {
                p.phi_increment(neighbors_a.len()) + p.phi_increment(neighbors_b.len())
            }
            EnergyModel::TwoStar => {
                let (a, b) = e.endpoints();
                let sa: u64 = neighbors_a.iter().map(|&k| a.l1(k)).sum();
                let sb: u64 = neighbors_b.iter().map(|&k| b.l1(k)).sum();
                0.5 * e.length() as f64 * (sa + sb) as f64
            }
        }
    }

    /// The constant `M`, a uniform lower bound on the local difference.
    pub fn constant_m(&self) -> f64 {
        match self {
            EnergyModel::EdgeOnly | EnergyModel::TwoStar => 0.0,
            EnergyModel::Ferrari(p) => -2.0 * p.h0,
        }
    }

    /// `exp(-beta * delta + beta * M)` for a precomputed local difference.
    pub fn q_from_delta(&self, beta: f64, delta: f64) -> f64 {
        (-beta * (delta - self.constant_m())).exp().min(1.0)
    }

    /// Acceptance probability `Q(e | x)` of an attempted birth of `e`.
    pub fn acceptance_q(&self, beta: f64, x: &GraphState, e: Edge) -> Result<f64> {
        crate::error::check_beta(beta)?;
        Ok(self.q_from_delta(beta, self.local_difference(x, e)?))
    }

    /// Birth rate `exp(-beta L - beta M)` of rectangles with basis `e`.
    pub fn birth_rate(&self, beta: f64, e: Edge) -> f64 {
        rectangle_rate(beta, self.constant_m(), e.length())
    }
}

/// `exp(-beta * length - beta * m)`.
pub fn rectangle_rate(beta: f64, m: f64, length: u64) -> f64 {
    (-beta * (length as f64 + m)).exp()
}
