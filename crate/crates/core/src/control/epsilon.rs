use serde::{Deserialize, Serialize};

/// Inexactness schedule `ε_i^k = γ^k α₁ min{α₂, 1/‖∇_iF(x^k)‖}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl EpsilonSchedule {
    pub fn new(alpha1: f64, alpha2: f64) -> Self {
        Self { alpha1, alpha2 }
    }

    pub fn exact() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn is_exact(&self) -> bool {
        self.alpha1 == 0.0
    }

    pub fn epsilon_for_block(&self, gamma: f64, grad_norm: f64) -> f64 {
        if self.alpha1 == 0.0 {
            return 0.0;
        }
        let cap = if grad_norm > 0.0 {
            self.alpha2.min(1.0 / grad_norm)
        } else {
            self.alpha2
        };
        gamma * self.alpha1 * cap
    }
}
