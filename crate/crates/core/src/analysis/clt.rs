//! Finite-window normality check for sums of translated local functions.
//!
//! This is a property check at a fixed window size, not a reproduction of
//! an asymptotic statement: nothing here takes a limit.

use serde::Serialize;

use super::stats::{ks_normal, moments, KsResult};
use crate::error::{Error, Result};
use crate::model::{EnergyModel, Vertex, Window};
use crate::perfect::{perfect_samples, ClanOptions, PerfectSample};

/// Fewest replicas for which a p-value is reported.
pub const MIN_REPLICAS: usize = 100;

#[derive(Clone, Debug)]
pub struct CltConfig {
    /// Vertices `i` over which `tau_i f` is summed.
    pub inner: Window,
    /// Extra layer sampled around `inner` so that every translate of `f`
    /// sees the edges it depends on. Functions of full vertex degrees need
    /// none: the sampler reports every edge touching its window.
    pub margin: u64,
    pub replicas: usize,
    pub seed: u64,
    /// Exact `mu f` when known; adds a second set of diagnostics.
    pub reference_mean: Option<f64>,
    pub options: ClanOptions,
}

#[derive(Clone, Debug, Serialize)]
pub struct Centering {
    pub label: &'static str,
    pub mean: f64,
    pub statistic_mean: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// KS against `N(0, sigma2)`; absent when the statistic is degenerate.
    pub ks: Option<KsResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CltReport {
    pub inner_vertices: usize,
    pub sampled_vertices: usize,
    pub replicas: usize,
    pub seed: u64,
    /// Standardized sums centred by the grand mean.
    pub statistics: Vec<f64>,
    pub sigma2: f64,
    /// `sigma2 == 0`: the statistic carries no fluctuation to test.
    pub degenerate: bool,
    pub grand_mean: Centering,
    pub reference: Option<Centering>,
    pub note: &'static str,
}

impl CltReport {
    /// KS p-value of the grand-mean centring.
    pub fn p_value(&self) -> Option<f64> {
        self.grand_mean.ks.map(|k| k.p_value)
    }
}

fn centering(label: &'static str, mean: f64, stats: &[f64], sd: Option<f64>) -> Result<Centering> {
    let mom = moments(stats);
    Ok(Centering {
        label,
        mean,
        statistic_mean: mom.mean,
        skewness: mom.skewness,
        excess_kurtosis: mom.excess_kurtosis,
        ks: sd.map(|sd| ks_normal(stats, 0.0, sd)).transpose()?,
    })
}

/// Samples `replicas` perfect draws and tests
/// `|V|^{-1/2} sum_{i in V} (tau_i f - c)` for normality.
pub fn clt_experiment(
    model: EnergyModel,
    beta: f64,
    f: impl Fn(&PerfectSample, Vertex) -> f64 + Sync,
    config: &CltConfig,
) -> Result<CltReport> {
    if config.replicas < MIN_REPLICAS {
        return Err(Error::InsufficientReplicas { needed: MIN_REPLICAS, got: config.replicas });
    }
    let sampled = if config.margin == 0 { config.inner.clone() } else { config.inner.expanded_box(config.margin) };
    let draws = perfect_samples(model, &sampled, beta, config.replicas, config.seed, &config.options)?;
    let n_inner = config.inner.len() as f64;
    let sums: Vec<f64> = draws.iter().map(|s| config.inner.vertices().map(|v| f(s, v)).sum()).collect();
    let grand = sums.iter().sum::<f64>() / (sums.len() as f64 * n_inner);
    let statistics: Vec<f64> = sums.iter().map(|s| (s - n_inner * grand) / n_inner.sqrt()).collect();
    let sigma2 = moments(&statistics).variance;
    let degenerate = !(sigma2 > 1e-300);
    let sd = (!degenerate).then(|| sigma2.sqrt());
    let grand_mean = centering("grand mean", grand, &statistics, sd)?;
    let reference = config
        .reference_mean
        .map(|mu| {
            let shifted: Vec<f64> = sums.iter().map(|s| (s - n_inner * mu) / n_inner.sqrt()).collect();
            centering("reference mean", mu, &shifted, sd)
        })
        .transpose()?;
    Ok(CltReport {
        inner_vertices: config.inner.len(),
        sampled_vertices: sampled.len(),
        replicas: config.replicas,
        seed: config.seed,
        statistics,
        sigma2,
        degenerate,
        grand_mean,
        reference,
        note: "finite-window property check; the variance is estimated from the same replicas",
    })
}

/// `mu(d_i >= 1)` when edges are independent: `1 - prod_s (1 + e^{-beta s})^{-4s}`.
pub fn edge_only_degree_positive(beta: f64) -> f64 {
    let mut log_isolated = 0.0;
    for s in 1.. {
        let term = 4.0 * s as f64 * (-beta * s as f64).exp().ln_1p();
        log_isolated -= term;
        if term < 1e-18 {
            break;
        }
    }
    -log_isolated.exp_m1()
}
