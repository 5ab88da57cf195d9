use crate::error::{invalid, Result};

/// Consecutive objective decreases that trigger halving τ.
pub const HALVE_AFTER_DECREASES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauChange {
    Unchanged,
    Doubled,
    Halved,
}

/// Proximal weights with the doubling/halving heuristic and a finite change budget.
#[derive(Debug, Clone, PartialEq)]
pub struct TauController {
    tau: Vec<f64>,
    consecutive_decreases: usize,
    change_budget: usize,
    last_objective: f64,
}

impl TauController {
    pub fn new(tau: Vec<f64>, change_budget: usize, initial_objective: f64) -> Result<Self> {
        if tau.is_empty() {
            return Err(invalid("τ needs one entry per block"));
        }
        if let Some(t) = tau.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(invalid(format!("τ entries must be positive and finite, got {t}")));
        }
        Ok(Self {
            tau,
            consecutive_decreases: 0,
            change_budget,
            last_objective: initial_objective,
        })
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn remaining_budget(&self) -> usize {
        self.change_budget
    }

    pub fn consecutive_decreases(&self) -> usize {
        self.consecutive_decreases
    }

    pub fn min(&self) -> f64 {
        self.tau.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.tau.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Feeds the objective at the new iterate. Doubles every τ_i when the
    /// objective failed to decrease; halves them after
    /// [`HALVE_AFTER_DECREASES`] decreases in a row.
    pub fn update(&mut self, objective: f64) -> TauChange {
        let decreased = objective < self.last_objective;
        self.last_objective = objective;
        let change = if decreased {
            self.consecutive_decreases += 1;
            if self.consecutive_decreases >= HALVE_AFTER_DECREASES {
                self.consecutive_decreases = 0;
                self.scale(0.5, TauChange::Halved)
            } else {
                TauChange::Unchanged
            }
        } else {
            self.consecutive_decreases = 0;
            self.scale(2.0, TauChange::Doubled)
        };
        change
    }

    fn scale(&mut self, factor: f64, change: TauChange) -> TauChange {
        if self.change_budget == 0 {
            return TauChange::Unchanged;
        }
        self.change_budget -= 1;
        self.tau.iter_mut().for_each(|t| *t *= factor);
        change
    }
}
