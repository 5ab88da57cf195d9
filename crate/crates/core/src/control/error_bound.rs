use serde::{Deserialize, Serialize};

use crate::linalg::{dist, norm};
use crate::problem::{Anchor, CompositeProblem};
use crate::surrogate::BlockSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorBoundKind {
    /// `E_i = ‖x̂_i − x_i‖`
    ExactDistance,
    /// `E_i = ‖Π_{X_i}(x_i − ∇_iF(x)) − x_i‖`, valid only when `G ≡ 0`.
    ProjectedGradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBounds {
    pub values: Vec<f64>,
    pub max: f64,
}

impl ErrorBounds {
    fn from_values(values: Vec<f64>) -> Self {
        let max = values.iter().fold(0.0_f64, |m, v| m.max(*v));
        Self { values, max }
    }
}

/// Per-block distances between the best response and the current point.
pub fn exact_distance_bounds(problem: &CompositeProblem, x: &[f64], xhat: &[BlockSolution]) -> ErrorBounds {
    let partition = problem.partition();
    let values = xhat
        .iter()
        .enumerate()
        .map(|(i, sol)| dist(sol.z.as_slice(), partition.block(x, i)))
        .collect();
    ErrorBounds::from_values(values)
}

pub fn projected_gradient_bounds(problem: &CompositeProblem, anchor: &Anchor) -> ErrorBounds {
    let values = (0..problem.num_blocks())
        .map(|i| {
            let x_i = anchor.block_x(problem, i);
            let g_i = anchor.block_gradient(problem, i);
            let step: Vec<f64> = x_i.iter().zip(g_i).map(|(x, g)| x - g).collect();
            let p = problem.feasible(i).project_unchecked(&step);
            norm((p - nalgebra::DVector::from_column_slice(x_i)).as_slice())
        })
        .collect();
    ErrorBounds::from_values(values)
}
