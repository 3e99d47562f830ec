//! Python bindings for the sampler, the exact tables and the bounds.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use sggraph::analysis;
use sggraph::exact;
use sggraph::forward;
use sggraph::perfect::{self, Caps, ClanOptions};
use sggraph::validation;
use sggraph::{Edge as CoreEdge, EnergyModel, GraphState, Vertex};

type EdgeTuple = ((i64, i64), (i64, i64));

fn to_py(e: sggraph::Error) -> PyErr {
    match e {
        sggraph::Error::ClanExplosion { .. } | sggraph::Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn tuple(e: CoreEdge) -> EdgeTuple {
    let (a, b) = e.endpoints();
    ((a.x, a.y), (b.x, b.y))
}

fn core_edge(e: EdgeTuple) -> PyResult<CoreEdge> {
    CoreEdge::new(Vertex::new(e.0 .0, e.0 .1), Vertex::new(e.1 .0, e.1 .1)).map_err(to_py)
}

/// Energy model: `Model.edge()`, `Model.ferrari(h0, h1)` or `Model.twostar()`.
#[pyclass(name = "Model", frozen, from_py_object)]
#[derive(Clone)]
struct Model(EnergyModel);

#[pymethods]
impl Model {
    #[staticmethod]
    fn edge() -> Self {
        Model(EnergyModel::EdgeOnly)
    }

    #[staticmethod]
    fn ferrari(h0: f64, h1: f64) -> PyResult<Self> {
        EnergyModel::ferrari(h0, h1).map(Model).map_err(to_py)
    }

    #[staticmethod]
    fn twostar() -> Self {
        Model(EnergyModel::TwoStar)
    }

    /// Lower bound `M` of the local differences.
    #[getter]
    fn m(&self) -> f64 {
        self.0.constant_m()
    }

    fn hamiltonian(&self, window: &Window, edges: Vec<EdgeTuple>) -> PyResult<f64> {
        let x = graph(window, edges)?;
        Ok(self.0.hamiltonian(&x))
    }

    fn local_difference(&self, window: &Window, edges: Vec<EdgeTuple>, edge: EdgeTuple) -> PyResult<f64> {
        let x = graph(window, edges)?;
        self.0.local_difference(&x, core_edge(edge)?).map_err(to_py)
    }

    fn acceptance(&self, beta: f64, window: &Window, edges: Vec<EdgeTuple>, edge: EdgeTuple) -> PyResult<f64> {
        let x = graph(window, edges)?;
        self.0.acceptance_q(beta, &x, core_edge(edge)?).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Model({})", self.0)
    }
}

/// Finite vertex set: `Window.rect(x0, x1, y0, y1)` or `Window(vertices)`.
#[pyclass(name = "Window", frozen, from_py_object)]
#[derive(Clone)]
struct Window(Arc<sggraph::Window>);

#[pymethods]
impl Window {
    #[new]
    fn new(vertices: Vec<(i64, i64)>) -> PyResult<Self> {
        sggraph::Window::from_vertices(vertices.into_iter().map(|(x, y)| Vertex::new(x, y)))
            .map(|w| Window(Arc::new(w)))
            .map_err(to_py)
    }

    #[staticmethod]
    fn rect(x0: i64, x1: i64, y0: i64, y1: i64) -> PyResult<Self> {
        sggraph::Window::rect(x0, x1, y0, y1).map(|w| Window(Arc::new(w))).map_err(to_py)
    }

    fn vertices(&self) -> Vec<(i64, i64)> {
        self.0.vertices().map(|v| (v.x, v.y)).collect()
    }

    /// Vertex pairs in canonical order; bit `k` of a state mask is edge `k`.
    fn edges(&self) -> Vec<EdgeTuple> {
        self.0.edges().into_iter().map(tuple).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Window({} vertices)", self.0.len())
    }
}

fn graph(window: &Window, edges: Vec<EdgeTuple>) -> PyResult<GraphState> {
    let edges = edges.into_iter().map(core_edge).collect::<PyResult<Vec<_>>>()?;
    GraphState::from_edges(window.0.clone(), edges).map_err(to_py)
}

#[pyfunction]
fn alpha(beta: f64, m: f64) -> PyResult<f64> {
    analysis::alpha(beta, m).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (m, tol = analysis::DEFAULT_TOL))]
fn beta_star(m: f64, tol: f64) -> PyResult<f64> {
    analysis::beta_star(m, tol).map_err(to_py)
}

#[pyfunction]
fn expected_degree_bound(beta: f64, m: f64) -> PyResult<f64> {
    analysis::expected_degree_bound(beta, m).map_err(to_py)
}

/// Exact Gibbs table of a small window as a dict.
#[pyfunction]
fn exact_distribution<'py>(py: Python<'py>, model: &Model, window: &Window, beta: f64) -> PyResult<Bound<'py, PyDict>> {
    let d = exact::exact_distribution(model.0, &window.0, beta).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("edges", d.edges().iter().map(|&e| tuple(e)).collect::<Vec<_>>())?;
    out.set_item("probabilities", d.probabilities().to_vec())?;
    out.set_item("energies", d.energies().to_vec())?;
    out.set_item("log_partition", d.log_partition())?;
    out.set_item("marginals", d.edge_marginals())?;
    Ok(out)
}

#[pyfunction]
fn detailed_balance_residual(model: &Model, window: &Window, beta: f64) -> PyResult<f64> {
    exact::detailed_balance_residual(model.0, &window.0, beta).map_err(to_py)
}

#[pyfunction]
fn total_variation(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    exact::total_variation(&p, &q).map_err(to_py)
}

/// `count` exact draws on `window`, each a list of edges inside it.
#[pyfunction]
#[pyo3(signature = (model, window, beta, count, seed, max_rectangles = 1_000_000, max_time_depth = 1e4))]
fn perfect_samples(
    py: Python<'_>,
    model: &Model,
    window: &Window,
    beta: f64,
    count: usize,
    seed: u64,
    max_rectangles: usize,
    max_time_depth: f64,
) -> PyResult<Vec<Vec<EdgeTuple>>> {
    let options = ClanOptions { caps: Caps { max_rectangles, max_time_depth }, ..Default::default() };
    let (m, w) = (model.0, window.0.clone());
    let samples = py
        .detach(|| perfect::perfect_samples(m, &w, beta, count, seed, &options))
        .map_err(to_py)?;
    Ok(samples.iter().map(|s| s.graph.edges().map(tuple).collect()).collect())
}

/// Time average of the edge count: `(mean, standard_error)`.
#[pyfunction]
fn ergodic_edge_count(model: &Model, window: &Window, beta: f64, burn: f64, horizon: f64, seed: u64) -> PyResult<(f64, f64)> {
    let est = forward::ergodic_average(model.0, &window.0, beta, |x| x.edge_count() as f64, burn, horizon, seed)
        .map_err(to_py)?;
    Ok((est.mean, est.std_error))
}

/// Free-process multiplicities at time `t`, from the empty configuration.
#[pyfunction]
fn simulate_free(window: &Window, beta: f64, m: f64, t: f64, seed: u64) -> PyResult<Vec<(EdgeTuple, u32)>> {
    let z = forward::simulate_free(&window.0, beta, m, &forward::MultigraphState::new(), t, seed).map_err(to_py)?;
    Ok(z.iter().map(|(e, c)| (tuple(e), c)).collect())
}

/// Runs one reference check; returns `(id, passed, detail)` rows.
#[pyfunction]
#[pyo3(signature = (id, seed = validation::DEFAULT_SEED))]
fn validate(py: Python<'_>, id: u32, seed: u64) -> Vec<(String, bool, String)> {
    py.detach(|| validation::run_criterion(id, seed))
        .into_iter()
        .map(|r| (r.id, r.passed, r.detail))
        .collect()
}

/// Module initializer; also usable from an embedded interpreter.
#[pymodule]
pub fn pysggraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Window>()?;
    m.add_function(wrap_pyfunction!(alpha, m)?)?;
    m.add_function(wrap_pyfunction!(beta_star, m)?)?;
    m.add_function(wrap_pyfunction!(expected_degree_bound, m)?)?;
    m.add_function(wrap_pyfunction!(exact_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(detailed_balance_residual, m)?)?;
    m.add_function(wrap_pyfunction!(total_variation, m)?)?;
    m.add_function(wrap_pyfunction!(perfect_samples, m)?)?;
    m.add_function(wrap_pyfunction!(ergodic_edge_count, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_free, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
