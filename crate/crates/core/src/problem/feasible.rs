use nalgebra::DVector;

use crate::error::{invalid, Result};

/// Closed convex set `X_i` for one block.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    AllSpace,
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl FeasibleSet {
    pub fn new_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let set = FeasibleSet::Box { lower, upper };
        set.validate(None)?;
        Ok(set)
    }

    pub fn is_all_space(&self) -> bool {
        matches!(self, FeasibleSet::AllSpace)
    }

    pub(crate) fn validate(&self, dim: Option<usize>) -> Result<()> {
        if let FeasibleSet::Box { lower, upper } = self {
            if lower.len() != upper.len() {
                return Err(invalid("box bounds have different lengths"));
            }
            if let Some(d) = dim {
                if lower.len() != d {
                    return Err(invalid(format!(
                        "box has dimension {}, block has {d}",
                        lower.len()
                    )));
                }
            }
            if let Some(j) = lower.iter().zip(upper).position(|(l, u)| !(l <= u)) {
                return Err(invalid(format!(
                    "box coordinate {j} has lower {} > upper {}",
                    lower[j], upper[j]
                )));
            }
        }
        Ok(())
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, v: &[f64]) -> Result<DVector<f64>> {
        self.validate(Some(v.len()))?;
        Ok(self.project_unchecked(v))
    }

    pub(crate) fn project_unchecked(&self, v: &[f64]) -> DVector<f64> {
        match self {
            FeasibleSet::AllSpace => DVector::from_column_slice(v),
            FeasibleSet::Box { lower, upper } => {
                DVector::from_fn(v.len(), |j, _| v[j].clamp(lower[j], upper[j]))
            }
        }
    }

    /// Clamp of a single coordinate; identity for `AllSpace`.
    pub(crate) fn clamp_coord(&self, j: usize, v: f64) -> f64 {
        match self {
            FeasibleSet::AllSpace => v,
            FeasibleSet::Box { lower, upper } => v.clamp(lower[j], upper[j]),
        }
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        match self {
            FeasibleSet::AllSpace => v.iter().all(|x| x.is_finite()),
            FeasibleSet::Box { lower, upper } => v
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(x, (l, u))| *x >= l - tol && *x <= u + tol),
        }
    }
}
