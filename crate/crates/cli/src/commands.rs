use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sggraph::analysis::{
    alpha, beta_star, clan_tail_experiment, clt_experiment, edge_only_degree_positive, expected_degree_bound,
    marginal_experiment, mixing_bound, resolve_beta_tilde, sd_tail_bound, space_convergence_bound, tl_tail_bound,
    vertex_rate, BoundQuery, ClanKind, CltConfig, Support, DEFAULT_TOL,
};
use sggraph::exact::{detailed_balance_residual, exact_distribution, exact_expectation, ExactDistribution};
use sggraph::forward::{ergodic_average, write_trace, Engine};
use sggraph::io::{edge_quad, write_samples_ndjson};
use sggraph::perfect::{perfect_samples, Caps, ClanOptions};
use sggraph::validation::{run_criterion, CRITERIA};
use sggraph::{Edge, GraphState, Vertex};
use thiserror::Error;

use crate::config::{ConfigError, Format, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] sggraph::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} checks failed")]
    Validation { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(sggraph::Error::ClanExplosion { .. }) => 4,
            CliError::Core(sggraph::Error::Io(_)) | CliError::Io(_) => 1,
            CliError::Core(_) => 3,
            CliError::Validation { .. } => 5,
        }
    }
}

pub type CmdResult = Result<(), CliError>;

/// Provenance written at the top of every data file.
#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a RunConfig,
}

fn header(c: &RunConfig) -> Header<'_> {
    Header { tool: "sggraph", version: env!("CARGO_PKG_VERSION"), seed: c.seed, config: c }
}

/// `# {...}` line for CSV files.
fn csv_header(c: &RunConfig) -> String {
    format!("# {}\n", serde_json::to_string(&header(c)).expect("header serializes"))
}

fn out_dir(c: &RunConfig) -> std::io::Result<Option<&Path>> {
    match &c.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            Ok(Some(dir.as_path()))
        }
        None => Ok(None),
    }
}

/// Writes the JSON report to `<out>/<name>.json` and prints it.
fn emit(c: &RunConfig, name: &str, start: Instant, result: Value, text: String) -> CmdResult {
    let report = json!({
        "tool": "sggraph",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": c.seed,
        "config": c.echo(),
        "duration_seconds": start.elapsed().as_secs_f64(),
        "result": result,
    });
    let pretty = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(dir) = out_dir(c)? {
        fs::write(dir.join(format!("{name}.json")), format!("{pretty}\n"))?;
    }
    let mut stdout = std::io::stdout().lock();
    match c.format {
        Format::Json => writeln!(stdout, "{pretty}")?,
        Format::Text => write!(stdout, "{text}")?,
    }
    Ok(())
}

fn options(c: &RunConfig) -> ClanOptions {
    ClanOptions { caps: Caps { max_rectangles: c.max_rect, max_time_depth: c.max_depth }, ..Default::default() }
}

fn edge_json(e: Edge) -> Value {
    json!(edge_quad(e))
}

fn graph_json(x: &GraphState) -> Value {
    Value::Array(x.edges().map(edge_json).collect())
}

pub fn cmd_exact(c: &RunConfig) -> CmdResult {
    let start = Instant::now();
    let (model, beta, window) = (c.energy_model()?, c.beta()?, c.window()?);
    let d = ExactDistribution::new(model, &window, beta)?;
    let residual = detailed_balance_residual(model, &window, beta)?;
    if let Some(dir) = out_dir(c)? {
        let mut buf = csv_header(c).into_bytes();
        d.write_csv(&mut buf)?;
        fs::write(dir.join("distribution.csv"), buf)?;
    }
    let marginals: Vec<Value> = d
        .edges()
        .iter()
        .zip(d.edge_marginals())
        .map(|(&e, p)| json!({ "edge": edge_json(e), "marginal": p }))
        .collect();
    let mean_edges = exact_expectation(&d, |x| x.edge_count() as f64);
    let mut text = format!("log Z = {:.12}\ndetailed balance residual = {residual:.3e}\n", d.log_partition());
    for (&e, p) in d.edges().iter().zip(d.edge_marginals()) {
        text += &format!("{e}: {p:.6}\n");
    }
    emit(
        c,
        "summary",
        start,
        json!({
            "model": model,
            "beta": beta,
            "window": window,
            "states": d.probabilities().len(),
            "partition": d.partition(),
            "log_partition": d.log_partition(),
            "expected_edge_count": mean_edges,
            "marginals": marginals,
            "detailed_balance_residual": residual,
        }),
        text,
    )
}

pub fn cmd_forward(c: &RunConfig) -> CmdResult {
    let start = Instant::now();
    let (model, beta, window) = (c.energy_model()?, c.beta()?, c.window()?);
    let horizon = c.horizon.unwrap_or(1_000.0);
    let burn = c.burn.unwrap_or(horizon / 10.0);
    let x0 = GraphState::empty(Arc::new(window.clone()));
    let mut engine = Engine::dependent(model, &window, beta, &x0, c.seed)?;
    let mut records = Vec::new();
    engine.run_until(horizon, |r, _| records.push(*r))?;
    if let Some(dir) = out_dir(c)? {
        let mut buf = csv_header(c).into_bytes();
        write_trace(&records, &mut buf)?;
        fs::write(dir.join("trace.csv"), buf)?;
    }
    let est = ergodic_average(model, &window, beta, |x| x.edge_count() as f64, burn, horizon, c.seed)?;
    // the exact value is only affordable on small windows
    let exact = if window.edge_count() <= 16 {
        Some(exact_expectation(&exact_distribution(model, &window, beta)?, |x| x.edge_count() as f64))
    } else {
        None
    };
    let text = format!(
        "events = {}, dominance violations = {}\nmean edge count = {:.6} +- {:.6}{}\n",
        engine.events(),
        engine.violations(),
        est.mean,
        est.std_error,
        exact.map_or(String::new(), |e| format!(" (exact {e:.6})"))
    );
    emit(
        c,
        "report",
        start,
        json!({
            "model": model,
            "beta": beta,
            "window": window,
            "horizon": horizon,
            "burn": burn,
            "events": engine.events(),
            "dominance_violations": engine.violations(),
            "final_state": graph_json(engine.state()),
            "edge_count_average": est,
            "exact_edge_count": exact,
        }),
        text,
    )
}

pub fn cmd_perfect(c: &RunConfig) -> CmdResult {
    let start = Instant::now();
    let (model, beta, window) = (c.energy_model()?, c.beta()?, c.window()?);
    let n = c.samples.unwrap_or(1_000);
    let opts = options(c);
    let samples = perfect_samples(model, &window, beta, n, c.seed, &opts)?;
    if let Some(dir) = out_dir(c)? {
        let mut buf = Vec::new();
        write_samples_ndjson(Some(&header(c)), &samples, &mut buf)?;
        fs::write(dir.join("samples.ndjson"), buf)?;
    }
    let marginals = marginal_experiment(model, &window, beta, &samples)?;
    let independent: Option<Vec<Value>> = matches!(model, sggraph::EnergyModel::EdgeOnly).then(|| {
        marginals
            .edges
            .iter()
            .map(|m| {
                let w = (-beta * m.edge.length() as f64).exp();
                let p = w / (1.0 + w);
                let sigma = (p * (1.0 - p) / n as f64).sqrt();
                json!({ "edge": edge_json(m.edge), "empirical": m.empirical, "exact": p, "z": (m.empirical - p) / sigma })
            })
            .collect()
    });
    let mut degrees: BTreeMap<usize, usize> = BTreeMap::new();
    let mut clan_sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for s in &samples {
        for v in window.vertices() {
            *degrees.entry(s.degree(v)).or_default() += 1;
        }
        *clan_sizes.entry(s.clan_size).or_default() += 1;
    }
    let center = window.center();
    let edge = Edge::new(center, center.translate(1, 0))?;
    let ks: Vec<u64> = (1..=c.k).collect();
    let tails = clan_tail_experiment(
        beta,
        model.constant_m(),
        c.beta_tilde,
        center,
        edge,
        &ks,
        &[0.5, 1.0, 2.0, 4.0],
        n,
        sggraph::rng::derive_key(sggraph::rng::tag::CLAN, &[c.seed, 1]),
        &opts,
    )?;
    let text = format!(
        "{n} samples, mean degree {:.4} (bound {:.4}), mean clan size {:.2}\n",
        marginals.mean_degree,
        marginals.degree_bound,
        samples.iter().map(|s| s.clan_size).sum::<usize>() as f64 / n as f64
    );
    emit(
        c,
        "stats",
        start,
        json!({
            "model": model,
            "beta": beta,
            "window": window,
            "samples": n,
            "edge_marginals": marginals,
            "independent_edges": independent,
            "degree_histogram": degrees,
            "clan_size_histogram": clan_sizes,
            "tails": tails,
        }),
        text,
    )
}

pub fn cmd_bounds(c: &RunConfig) -> CmdResult {
    let start = Instant::now();
    let (model, beta) = (c.energy_model()?, c.beta()?);
    let m = model.constant_m();
    let bs = beta_star(m, DEFAULT_TOL)?;
    let bt = resolve_beta_tilde(beta, m, c.beta_tilde)?;
    let window = c.window_or("-5:5,-5:5")?;
    let center = window.center();
    let sd: Vec<Value> = (1..=c.k)
        .map(|k| {
            Ok(json!({
                "k": k,
                "vertex": sd_tail_bound(ClanKind::Vertex, k, beta, bt, m)?,
                "edge_length_1": sd_tail_bound(ClanKind::Edge { length: 1 }, k, beta, bt, m)?,
            }))
        })
        .collect::<sggraph::Result<_>>()?;
    let tl: Vec<Value> = [0.5, 1.0, 2.0, 4.0, 8.0]
        .into_iter()
        .map(|t| Ok(json!({ "b": 1.0, "t": t, "edge_length_1": tl_tail_bound(1, 1.0, t, beta, m)? })))
        .collect::<sggraph::Result<_>>()?;
    let q_center = BoundQuery::new(beta, Some(bt), m, Support::Vertices(vec![center]), window.clone(), 1.0)?;
    let convergence = space_convergence_bound(&q_center)?;
    let mixing: Vec<Value> = (1..=2 * c.k as i64)
        .filter(|&n| window.contains(center.translate(n, 0)))
        .map(|n| {
            let q = BoundQuery::new(beta, Some(bt), m, Support::Vertices(vec![center.translate(n, 0)]), window.clone(), 1.0)?;
            Ok(json!({ "distance": n, "bound": mixing_bound(&q_center, &q)? }))
        })
        .collect::<sggraph::Result<_>>()?;
    let a = alpha(beta, m)?;
    let text = format!("M = {m}\nalpha(beta) = {a:.6}\nbeta* = {bs:.6}\nbeta~ = {bt:.6}\n");
    emit(
        c,
        "bounds",
        start,
        json!({
            "model": model,
            "m": m,
            "beta": beta,
            "beta_star": bs,
            "beta_tilde": bt,
            "alpha": a,
            "alpha_tilde": alpha(bt, m)?,
            "vertex_rate": vertex_rate(beta, m)?,
            "expected_degree_bound": expected_degree_bound(beta, m)?,
            "space_diameter_tail": sd,
            "time_length_tail": tl,
            "space_convergence": { "window": window, "support": [center], "f_sup_norm": 1.0, "bound": convergence },
            "mixing": { "from": center, "f_sup_norm": 1.0, "g_sup_norm": 1.0, "values": mixing },
        }),
        text,
    )
}

pub fn cmd_validate(c: &RunConfig) -> CmdResult {
    let start = Instant::now();
    let ids: Vec<u32> = c.only.clone().unwrap_or_else(|| CRITERIA.iter().map(|x| x.0).collect());
    if let Some(bad) = ids.iter().find(|&&id| !CRITERIA.iter().any(|x| x.0 == id)) {
        return Err(ConfigError::Value { key: "only".into(), message: format!("no criterion {bad}") }.into());
    }
    let results: Vec<_> = ids.iter().flat_map(|&id| run_criterion(id, c.seed)).collect();
    let failed = results.iter().filter(|r| !r.passed).count();
    let text: String = results.iter().map(|r| r.line() + "\n").collect();
    emit(c, "validation", start, json!({ "passed": failed == 0, "results": results }), text)?;
    if failed > 0 {
        return Err(CliError::Validation { failed, total: results.len() });
    }
    Ok(())
}

pub fn cmd_clt(c: &RunConfig) -> CmdResult {
    let start = Instant::now();
    let (model, beta) = (c.energy_model()?, c.beta()?);
    let inner = c.window_or("0:19,0:19")?;
    let config = CltConfig {
        inner,
        margin: c.margin,
        replicas: c.samples.unwrap_or(500),
        seed: c.seed,
        reference_mean: matches!(model, sggraph::EnergyModel::EdgeOnly).then(|| edge_only_degree_positive(beta)),
        options: options(c),
    };
    let report = clt_experiment(model, beta, |s, v: Vertex| (s.degree(v) >= 1) as u8 as f64, &config)?;
    let text = format!(
        "replicas = {}, sigma2 = {:.5}, KS p = {}\n",
        report.replicas,
        report.sigma2,
        report.p_value().map_or("none (degenerate)".into(), |p| format!("{p:.4}"))
    );
    emit(c, "clt", start, json!({ "model": model, "beta": beta, "function": "indicator(d_i >= 1)", "report": report }), text)
}
