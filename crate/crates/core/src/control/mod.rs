//! Per-iteration controllers: stepsize, error bounds, block selection, τ and ε.

mod epsilon;
mod error_bound;
mod selection;
mod stepsize;
mod tau;

pub use epsilon::EpsilonSchedule;
pub use error_bound::{exact_distance_bounds, projected_gradient_bounds, ErrorBoundKind, ErrorBounds};
pub use selection::{SelectionMode, SelectionPolicy};
pub use stepsize::{gamma_next, StepsizeState};
pub use tau::{TauChange, TauController, HALVE_AFTER_DECREASES};
