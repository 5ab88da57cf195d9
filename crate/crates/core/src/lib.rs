//! Parallel inexact block methods for `min F(x) + G(x)` over a product of
//! simple sets, with FISTA and Gauss-Seidel baselines and a sparse least
//! squares instance generator.

pub mod baselines;
pub mod control;
pub mod diagnostics;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod problem;
pub mod solver;
pub mod surrogate;

pub use error::{Error, Result};
