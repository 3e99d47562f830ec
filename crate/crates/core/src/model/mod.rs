//! Lattice geometry, graph states and energy functions.

mod energy;
mod graph;
mod lattice;

pub use energy::{rectangle_rate, EnergyModel, FerrariParams};
pub use graph::GraphState;
pub use lattice::{edge_length, set_distance, shell, shell_point, Bounds, Edge, Vertex, Window};
