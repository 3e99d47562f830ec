//! Spatial Gibbs random graphs on the integer lattice: exact enumeration,
//! forward birth-death simulation, perfect sampling through backward clans,
//! and the analytic bounds that govern them.

pub mod analysis;
pub mod error;
pub mod exact;
pub mod forward;
pub mod io;
pub mod model;
pub mod perfect;
pub mod rng;
pub mod validation;

pub use error::{Error, Result};
pub use model::{EnergyModel, Edge, GraphState, Vertex, Window};
