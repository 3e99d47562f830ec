//! Monte Carlo harnesses comparing sampled clans and graphs with the bounds.

use rayon::prelude::*;
use serde::Serialize;

use super::bounds::{expected_degree_bound, resolve_beta_tilde, sd_tail_bound, tl_tail_bound, ClanKind};
use super::stats::binomial_sigma;
use crate::error::{invalid, Result};
use crate::model::{rectangle_rate, EnergyModel, Edge, Vertex, Window};
use crate::perfect::{sample_backward_clan, Clan, ClanOptions, Origin, PerfectSample};
use crate::rng::{derive_key, replica_stream, tag};

/// Empirical exceedance frequency next to its bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailPoint {
    pub threshold: f64,
    pub empirical: f64,
    pub sigma: f64,
    pub bound: f64,
    /// `empirical <= bound + 3 sigma`, with sigma taken at the bound.
    pub within: bool,
}

fn tail_point(threshold: f64, hits: usize, n: usize, bound: f64) -> TailPoint {
    let empirical = hits as f64 / n as f64;
    let sigma = binomial_sigma(bound.min(1.0), n);
    TailPoint { threshold, empirical, sigma, bound, within: empirical <= bound + 3.0 * sigma }
}

/// Independent clans of `origin`, one stream per replica.
pub fn sample_clans(
    origin: &Origin,
    beta: f64,
    m: f64,
    count: usize,
    seed: u64,
    options: &ClanOptions,
) -> Result<Vec<Clan>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| sample_backward_clan(origin, beta, m, &mut replica_stream(seed, i), options))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ClanTailReport {
    pub beta: f64,
    pub beta_tilde: f64,
    pub m: f64,
    pub clans: usize,
    pub seed: u64,
    pub mean_size: f64,
    pub space_diameter: Vec<TailPoint>,
    pub time_length: Vec<TailPoint>,
}

/// `P(SD > k)` for the clan of `vertex` and `P(TL > bt)` for the clan of
/// `edge`, each from `clans` independent clans.
#[allow(clippy::too_many_arguments)]
pub fn clan_tail_experiment(
    beta: f64,
    m: f64,
    beta_tilde: Option<f64>,
    vertex: Vertex,
    edge: Edge,
    ks: &[u64],
    times: &[f64],
    clans: usize,
    seed: u64,
    options: &ClanOptions,
) -> Result<ClanTailReport> {
    if clans == 0 {
        return Err(invalid("clans", "need at least one clan"));
    }
    let bt = resolve_beta_tilde(beta, m, beta_tilde)?;
    let vertex_clans = sample_clans(&Origin::vertex(vertex), beta, m, clans, seed, options)?;
    let sds: Vec<u64> = vertex_clans.iter().map(Clan::space_diameter).collect();
    let mean_size = vertex_clans.iter().map(Clan::len).sum::<usize>() as f64 / clans as f64;
    let space_diameter = ks
        .iter()
        .map(|&k| {
            let hits = sds.iter().filter(|&&d| d > k).count();
            Ok(tail_point(k as f64, hits, clans, sd_tail_bound(ClanKind::Vertex, k, beta, bt, m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let edge_seed = derive_key(tag::CLAN, &[seed]);
    let edge_clans = sample_clans(&Origin::Edge(edge), beta, m, clans, edge_seed, options)?;
    let tls: Vec<f64> = edge_clans.iter().map(Clan::time_length).collect();
    let time_length = times
        .iter()
        .map(|&t| {
            let hits = tls.iter().filter(|&&x| x > t).count();
            Ok(tail_point(t, hits, clans, tl_tail_bound(edge.length(), 1.0, t, beta, m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClanTailReport { beta, beta_tilde: bt, m, clans, seed, mean_size, space_diameter, time_length })
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeMarginal {
    pub edge: Edge,
    pub empirical: f64,
    pub sigma: f64,
    pub bound: f64,
    pub within: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginalReport {
    pub samples: usize,
    pub edges: Vec<EdgeMarginal>,
    pub mean_degree: f64,
    pub degree_sigma: f64,
    pub degree_bound: f64,
    pub degree_within: bool,
}

/// Edge frequencies inside the window against `e^{-beta L - beta M}` and the
/// mean full degree of window vertices against `alpha / 2`.
pub fn marginal_experiment(
    model: EnergyModel,
    window: &Window,
    beta: f64,
    samples: &[PerfectSample],
) -> Result<MarginalReport> {
    let n = samples.len();
    if n < 2 {
        return Err(invalid("samples", "need at least two samples"));
    }
    let m = model.constant_m();
    let edges = window
        .edges()
        .into_iter()
        .map(|e| {
            let hits = samples.iter().filter(|s| s.graph.contains(e)).count();
            let bound = rectangle_rate(beta, m, e.length());
            let empirical = hits as f64 / n as f64;
            let sigma = binomial_sigma(bound.min(1.0), n);
            EdgeMarginal { edge: e, empirical, sigma, bound, within: empirical <= bound + 3.0 * sigma }
        })
        .collect();
    // per-sample mean over the window keeps the replicas independent
    let degrees: Vec<f64> = samples
        .iter()
        .map(|s| window.vertices().map(|v| s.degree(v) as f64).sum::<f64>() / window.len() as f64)
        .collect();
    let mom = super::stats::moments(&degrees);
    let degree_sigma = (mom.variance / n as f64).sqrt();
    let degree_bound = expected_degree_bound(beta, m)?;
    Ok(MarginalReport {
        samples: n,
        edges,
        mean_degree: mom.mean,
        degree_sigma,
        degree_bound,
        degree_within: mom.mean <= degree_bound + 3.0 * degree_sigma,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CovarianceEstimate {
    pub translation: (i64, i64),
    pub covariance: f64,
    pub std_error: f64,
}

/// Plug-in estimates of `mu(f tau_i f) - mu(f) mu(tau_i f)`, where
/// `f(s, v)` evaluates the translate of `f` centred at `v` on sample `s`.
pub fn empirical_covariance<S: Sync>(
    samples: &[S],
    f: impl Fn(&S, Vertex) -> f64 + Sync,
    base: Vertex,
    translations: &[(i64, i64)],
) -> Result<Vec<CovarianceEstimate>> {
    let n = samples.len();
    if n < 100 {
        return Err(crate::Error::InsufficientReplicas { needed: 100, got: n });
    }
    let x: Vec<f64> = samples.iter().map(|s| f(s, base)).collect();
    let mx = x.iter().sum::<f64>() / n as f64;
    Ok(translations
        .par_iter()
        .map(|&(dx, dy)| {
            let at = base.translate(dx, dy);
            let y: Vec<f64> = samples.iter().map(|s| f(s, at)).collect();
            let my = y.iter().sum::<f64>() / n as f64;
            let prods: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).collect();
            let cov = prods.iter().sum::<f64>() / n as f64;
            let var = prods.iter().map(|p| (p - cov).powi(2)).sum::<f64>() / (n - 1) as f64;
            CovarianceEstimate { translation: (dx, dy), covariance: cov, std_error: (var / n as f64).sqrt() }
        })
        .collect())
}
