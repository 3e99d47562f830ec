use thiserror::Error;

use crate::model::{Edge, Vertex};

/// Partial statistics carried by a clan construction that hit a cap.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplosionStats {
    pub rectangles: usize,
    pub proposals: u64,
    pub depth: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("an edge needs two distinct vertices, got {0} twice")]
    DegenerateEdge(Vertex),

    #[error("window must contain at least one vertex")]
    EmptyWindow,

    #[error("vertex {0} appears more than once in the window")]
    DuplicateVertex(Vertex),

    #[error("vertex {0} is outside the window")]
    VertexOutsideWindow(Vertex),

    #[error("edge {0} is not contained in the window")]
    EdgeOutsideWindow(Edge),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("window has {edges} vertex pairs; enumeration is limited to {limit} (2^{limit} states)")]
    WindowTooLarge { edges: usize, limit: usize },

    #[error("distribution tables have different supports ({left} vs {right} entries)")]
    SupportMismatch { left: usize, right: usize },

    #[error("beta = {beta} is not above the critical value beta* = {beta_star:.6} for M = {m}")]
    Subcritical { beta: f64, beta_star: f64, m: f64 },

    #[error(
        "clan explosion: cap `{cap}` exceeded after {} rectangles, {} proposals, depth {:.3}",
        stats.rectangles, stats.proposals, stats.depth
    )]
    ClanExplosion { cap: &'static str, stats: ExplosionStats },

    #[error("bisection could not bracket a root: {0}")]
    Bracket(String),

    #[error("{needed} replicas are required, got {got}")]
    InsufficientReplicas { needed: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(invalid("beta", format!("must be a positive finite number, got {beta}")));
    }
    Ok(())
}
