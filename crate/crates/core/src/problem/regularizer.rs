use serde::{Deserialize, Serialize};

use super::BlockPartition;
use crate::linalg::norm;

/// Block-separable convex regularizer `G(x) = Σ g_i(x_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regularizer {
    Zero,
    /// `g_i(x_i) = c‖x_i‖₁`
    L1 { weight: f64 },
    /// `g_i(x_i) = c‖x_i‖₂`
    GroupL2 { weight: f64 },
}

impl Regularizer {
    pub fn weight(&self) -> f64 {
        match *self {
            Regularizer::Zero => 0.0,
            Regularizer::L1 { weight } | Regularizer::GroupL2 { weight } => weight,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Regularizer::Zero)
    }

    /// `g_i` evaluated on one block.
    pub fn block_value(&self, u: &[f64]) -> f64 {
        match *self {
            Regularizer::Zero => 0.0,
            Regularizer::L1 { weight } => weight * u.iter().map(|v| v.abs()).sum::<f64>(),
            Regularizer::GroupL2 { weight } => weight * norm(u),
        }
    }

    pub fn value(&self, partition: &BlockPartition, x: &[f64]) -> f64 {
        (0..partition.num_blocks())
            .map(|i| self.block_value(partition.block(x, i)))
            .sum()
    }

    /// Global Lipschitz constant of `G` in the Euclidean norm.
    pub fn lipschitz(&self, partition: &BlockPartition) -> f64 {
        match *self {
            Regularizer::Zero => 0.0,
            Regularizer::L1 { weight } => weight * (partition.dim() as f64).sqrt(),
            Regularizer::GroupL2 { weight } => weight * (partition.num_blocks() as f64).sqrt(),
        }
    }
}
