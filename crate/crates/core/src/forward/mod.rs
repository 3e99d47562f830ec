//! Rectangle graphical construction on finite windows.

mod engine;
mod rectangle;

pub use engine::{
    coupled_run, coupled_run_events, ergodic_average, ergodic_average_batches, simulate_dependent,
    simulate_free, write_trace, CoupledRun, Engine, Estimate, EventKind, EventRecord, DEFAULT_BATCHES,
    MAX_HORIZON,
};
pub use rectangle::{generate_rectangles, initial_rectangles, MultigraphState, Rectangle, RectangleStream};
