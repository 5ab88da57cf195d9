use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Every block with `E_i ≥ ρ·M`.
    ThresholdAll,
    /// All blocks, every iteration.
    FullJacobi,
    /// Only the first block attaining `M` (Gauss-Southwell).
    SingleGreedy,
}

/// Greedy block selection; every produced set contains a block with `E_i ≥ ρ·M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionPolicy {
    pub rho: f64,
    pub mode: SelectionMode,
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        Self {
            rho: 0.5,
            mode: SelectionMode::ThresholdAll,
        }
    }
}

impl SelectionPolicy {
    pub fn new(rho: f64, mode: SelectionMode) -> Result<Self> {
        let p = Self { rho, mode };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(invalid(format!("ρ = {} must lie in (0, 1]", self.rho)));
        }
        Ok(())
    }

    /// Selected block indices in increasing order. With `max == 0` every
    /// block is returned; callers treat that case as converged.
    pub fn select_blocks(&self, errors: &[f64], max: f64) -> Vec<usize> {
        let all = || (0..errors.len()).collect::<Vec<_>>();
        if !(max > 0.0) {
            return all();
        }
        match self.mode {
            SelectionMode::FullJacobi => all(),
            SelectionMode::ThresholdAll => {
                let threshold = self.rho * max;
                errors
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| **e >= threshold)
                    .map(|(i, _)| i)
                    .collect()
            }
            SelectionMode::SingleGreedy => {
                let best = errors
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
                vec![best.0]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_selects_above_half_max() {
        let p = SelectionPolicy::new(0.5, SelectionMode::ThresholdAll).unwrap();
        assert_eq!(p.select_blocks(&[1.0, 0.4, 0.6], 1.0), vec![0, 2]);
    }

    #[test]
    fn rho_one_is_argmax() {
        let p = SelectionPolicy::new(1.0, SelectionMode::ThresholdAll).unwrap();
        assert_eq!(p.select_blocks(&[0.1, 0.9, 0.3], 0.9), vec![1]);
    }

    #[test]
    fn ties_all_selected() {
        let p = SelectionPolicy::default();
        assert_eq!(p.select_blocks(&[0.2; 4], 0.2), vec![0, 1, 2, 3]);
    }

    #[test]
    fn zero_max_returns_everything() {
        let p = SelectionPolicy::new(0.5, SelectionMode::SingleGreedy).unwrap();
        assert_eq!(p.select_blocks(&[0.0, 0.0], 0.0), vec![0, 1]);
    }

    #[test]
    fn single_greedy_takes_first_max() {
        let p = SelectionPolicy::new(0.5, SelectionMode::SingleGreedy).unwrap();
        assert_eq!(p.select_blocks(&[0.3, 0.7, 0.7], 0.7), vec![1]);
    }

    #[test]
    fn rho_out_of_range() {
        assert!(SelectionPolicy::new(0.0, SelectionMode::ThresholdAll).is_err());
        assert!(SelectionPolicy::new(1.5, SelectionMode::ThresholdAll).is_err());
    }
}
