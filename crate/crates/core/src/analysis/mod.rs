//! Closed-form constants and bounds, and the Monte Carlo checks built on them.

mod bounds;
mod clt;
mod constants;
mod experiments;
pub mod stats;

pub use bounds::{
    expected_degree_bound, mixing_bound, resolve_beta_tilde, restricted_degree_support, sd_tail_bound,
    space_convergence_bound, tl_tail_bound, BoundQuery, ClanKind, Support,
};
pub use clt::{clt_experiment, edge_only_degree_positive, Centering, CltConfig, CltReport, MIN_REPLICAS};
pub use constants::{alpha, beta_star, check_subcritical, vertex_rate, DEFAULT_TOL};
pub use experiments::{
    clan_tail_experiment, empirical_covariance, marginal_experiment, sample_clans, ClanTailReport,
    CovarianceEstimate, EdgeMarginal, MarginalReport, TailPoint,
};
