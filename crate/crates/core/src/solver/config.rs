use serde::{Deserialize, Serialize};

use crate::control::{EpsilonSchedule, ErrorBoundKind, SelectionPolicy};
use crate::error::{invalid, Result};
use crate::problem::CompositeProblem;
use crate::surrogate::SurrogateKind;

/// How the proximal weights τ_i are initialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TauInit {
    /// `tr(DᵀD) / 2n` for every block.
    Trace,
    /// The same value for every block.
    Value { value: f64 },
    /// One value per block.
    Explicit { values: Vec<f64> },
}

impl TauInit {
    pub fn resolve(&self, problem: &CompositeProblem) -> Result<Vec<f64>> {
        let n = problem.num_blocks();
        let tau = match self {
            TauInit::Trace => vec![problem.trace_tau(); n],
            TauInit::Value { value } => vec![*value; n],
            TauInit::Explicit { values } => {
                if values.len() != n {
                    return Err(invalid(format!("{} τ values for {n} blocks", values.len())));
                }
                values.clone()
            }
        };
        if let Some(t) = tau.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(invalid(format!("initial τ must be positive and finite, got {t}")));
        }
        Ok(tau)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub surrogate: SurrogateKind,
    pub error_bound: ErrorBoundKind,
    pub selection: SelectionPolicy,
    pub gamma0: f64,
    pub theta: f64,
    pub tau_init: TauInit,
    pub tau_change_budget: usize,
    pub epsilon: EpsilonSchedule,
    /// Stop once `M^k` drops to this value.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub time_budget_s: Option<f64>,
    pub workers: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            surrogate: SurrogateKind::ExactBlock,
            error_bound: ErrorBoundKind::ExactDistance,
            selection: SelectionPolicy::default(),
            gamma0: 0.9,
            theta: 1e-3,
            tau_init: TauInit::Trace,
            tau_change_budget: 50,
            epsilon: EpsilonSchedule::new(0.0, 1.0),
            tolerance: 1e-8,
            max_iterations: 5000,
            time_budget_s: None,
            workers: 1,
        }
    }
}

impl SolverConfig {
    /// Checks every parameter range and its compatibility with `problem`.
    pub fn validate(&self, problem: &CompositeProblem) -> Result<()> {
        if !(self.gamma0 > 0.0 && self.gamma0 <= 1.0) {
            return Err(invalid(format!("γ⁰ = {} must lie in (0, 1]", self.gamma0)));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(invalid(format!("θ = {} must lie in (0, 1)", self.theta)));
        }
        self.selection.validate()?;
        let EpsilonSchedule { alpha1, alpha2 } = self.epsilon;
        if !(alpha1 >= 0.0 && alpha2 >= 0.0 && alpha1.is_finite() && alpha2.is_finite()) {
            return Err(invalid("α₁ and α₂ must be finite and nonnegative"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(invalid("tolerance must be nonnegative"));
        }
        if self.workers == 0 {
            return Err(invalid("at least one worker is required"));
        }
        if let Some(t) = self.time_budget_s {
            if !(t > 0.0) {
                return Err(invalid("time budget must be positive"));
            }
        }
        self.tau_init.resolve(problem)?;
        if self.surrogate.requires_convexity() && !problem.smooth().is_convex() {
            return Err(invalid(format!(
                "{:?} surrogate requires F convex along blocks; use the linearized surrogate",
                self.surrogate
            )));
        }
        if self.error_bound == ErrorBoundKind::ProjectedGradient && !problem.regularizer().is_zero() {
            return Err(invalid("the projected-gradient error bound is only available when G ≡ 0"));
        }
        if alpha1 > 0.0 && !problem.regularizer().is_zero() {
            let lg = problem.regularizer().lipschitz(problem.partition());
            if !lg.is_finite() {
                return Err(invalid("inexact solves need a globally Lipschitz regularizer"));
            }
        }
        Ok(())
    }
}
