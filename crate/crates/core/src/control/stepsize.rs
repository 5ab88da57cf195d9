use crate::error::{invalid, Result};

/// `γ(1 − θγ)`
pub fn gamma_next(gamma: f64, theta: f64) -> f64 {
    gamma * (1.0 - theta * gamma)
}

/// Diminishing stepsize `γ^k = γ^{k−1}(1 − θγ^{k−1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepsizeState {
    gamma: f64,
    theta: f64,
    gamma0: f64,
}

impl StepsizeState {
    pub fn new(gamma0: f64, theta: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0 <= 1.0) {
            return Err(invalid(format!("γ⁰ = {gamma0} must lie in (0, 1]")));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(invalid(format!("θ = {theta} must lie in (0, 1)")));
        }
        Ok(Self {
            gamma: gamma0,
            theta,
            gamma0,
        })
    }

    pub fn current(&self) -> f64 {
        self.gamma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    /// Moves to the next stepsize and returns it.
    pub fn advance(&mut self) -> f64 {
        self.gamma = gamma_next(self.gamma, self.theta);
        self.gamma
    }
}
