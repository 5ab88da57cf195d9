//! Surrogate models `P_i` and the τ-regularized block subproblems built on them.
//!
//! A [`BlockSubproblem`] is
//! `h̃_i(u) = P_i(u; x) + (τ_i/2)‖u − x_i‖² + g_i(u)` over `X_i`, with the
//! proximal metric fixed to the identity. Its unique minimizer is the best
//! response `x̂_i(x, τ_i)`.

mod exact;
mod inner;
mod prox;

pub use exact::{
    solve_block_exact_group, solve_block_exact_lasso, solve_block_linearized, solve_block_newton,
};
pub use inner::{inexact_inner_solve, EXACT_INNER_TOL, INNER_MAX_ITERS};
pub use prox::{group_soft_threshold, prox_block, soft_threshold};

use std::borrow::Cow;

use nalgebra::{DMatrix, DMatrixView, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::problem::{Anchor, BlockGram, CompositeProblem, FeasibleSet, Regularizer, SmoothOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateKind {
    /// First-order model `F(x) + ∇_iF(x)ᵀ(u − x_i)`.
    Linearized,
    /// `F` itself restricted to the block: `F(u, x_{−i})`.
    ExactBlock,
    /// Second-order model with the block Hessian `∇²_{ii}F(x)`.
    NewtonBlock,
}

impl SurrogateKind {
    pub fn requires_convexity(&self) -> bool {
        !matches!(self, SurrogateKind::Linearized)
    }
}

impl std::str::FromStr for SurrogateKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "linearized" => Ok(SurrogateKind::Linearized),
            "exact" | "exact_block" => Ok(SurrogateKind::ExactBlock),
            "newton" | "newton_block" => Ok(SurrogateKind::NewtonBlock),
            other => Err(invalid(format!("unknown surrogate '{other}'"))),
        }
    }
}

/// A block update `z_i` with a certified bound `‖z_i − x̂_i‖ ≤ certified_accuracy`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSolution {
    pub z: DVector<f64>,
    pub certified_accuracy: f64,
    pub inner_iterations: usize,
}

impl BlockSolution {
    pub(crate) fn exact(z: DVector<f64>) -> Self {
        Self {
            z,
            certified_accuracy: 0.0,
            inner_iterations: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum BlockModel<'a> {
    Linear,
    /// `P(u) = gᵀd + ½ dᵀ(scale·M)d` with `d = u − x_i`.
    Quadratic { curvature: Cow<'a, BlockGram>, scale: f64 },
    /// `P(u) = F(u, x_{−i})` evaluated through the cached predictor.
    Restricted {
        smooth: &'a SmoothOracle,
        slab: DMatrixView<'a, f64>,
        predictor: &'a DVector<f64>,
        lipschitz: f64,
    },
}

#[derive(Debug, Clone)]
pub struct BlockSubproblem<'a> {
    index: usize,
    anchor: DVector<f64>,
    grad: DVector<f64>,
    tau: f64,
    kind: SurrogateKind,
    pub(crate) model: BlockModel<'a>,
    regularizer: Regularizer,
    feasible: Cow<'a, FeasibleSet>,
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(invalid(format!("τ = {tau} must be finite and nonnegative")));
    }
    Ok(())
}

impl<'a> BlockSubproblem<'a> {
    /// Subproblem for block `i` anchored at `anchor`.
    pub fn new(
        problem: &'a CompositeProblem,
        anchor: &'a Anchor,
        i: usize,
        tau: f64,
        kind: SurrogateKind,
    ) -> Result<Self> {
        problem.partition().check_index(i)?;
        let x_i = anchor.block_x(problem, i);
        let grad_i = DVector::from_column_slice(anchor.block_gradient(problem, i));
        Self::from_parts(problem, i, x_i, grad_i, &anchor.predictor, tau, kind)
    }

    /// Subproblem from explicit ingredients: the block's anchor value, the block
    /// gradient, and the predictor `Dx` at the full anchor point.
    pub fn from_parts(
        problem: &'a CompositeProblem,
        i: usize,
        x_i: &[f64],
        grad_i: DVector<f64>,
        predictor: &'a DVector<f64>,
        tau: f64,
        kind: SurrogateKind,
    ) -> Result<Self> {
        check_tau(tau)?;
        let smooth = problem.smooth();
        if kind.requires_convexity() && !smooth.is_convex() {
            return Err(invalid(format!(
                "{kind:?} surrogate needs F convex along each block"
            )));
        }
        let partition = problem.partition();
        let slab = smooth.design().columns(partition.offset(i), partition.size(i));
        let model = match kind {
            SurrogateKind::Linearized => BlockModel::Linear,
            SurrogateKind::ExactBlock if smooth.is_least_squares() => BlockModel::Quadratic {
                curvature: Cow::Borrowed(problem.gram(i)),
                scale: 2.0,
            },
            SurrogateKind::ExactBlock => {
                let bound = smooth
                    .curvature_bound()
                    .ok_or_else(|| invalid("exact block surrogate needs bounded loss curvature"))?;
                BlockModel::Restricted {
                    smooth,
                    slab,
                    predictor,
                    lipschitz: bound * problem.gram(i).max_eigenvalue(),
                }
            }
            SurrogateKind::NewtonBlock if smooth.is_least_squares() => BlockModel::Quadratic {
                curvature: Cow::Borrowed(problem.gram(i)),
                scale: 2.0,
            },
            SurrogateKind::NewtonBlock => {
                let w = smooth.loss_curvature(predictor);
                let weighted = DMatrix::from_fn(slab.nrows(), slab.ncols(), |r, c| slab[(r, c)] * w[r]);
                let hess = slab.tr_mul(&weighted);
                quadratic_model(hess)?
            }
        };
        Ok(Self {
            index: i,
            anchor: DVector::from_column_slice(x_i),
            grad: grad_i,
            tau,
            kind,
            model,
            regularizer: *problem.regularizer(),
            feasible: Cow::Borrowed(problem.feasible(i)),
        })
    }

    /// Standalone linearized subproblem.
    pub fn linearized(
        anchor: &[f64],
        grad: &[f64],
        tau: f64,
        regularizer: Regularizer,
        feasible: FeasibleSet,
    ) -> Result<BlockSubproblem<'static>> {
        check_tau(tau)?;
        check_block_dims(anchor, grad, &feasible, &regularizer)?;
        Ok(BlockSubproblem {
            index: 0,
            anchor: DVector::from_column_slice(anchor),
            grad: DVector::from_column_slice(grad),
            tau,
            kind: SurrogateKind::Linearized,
            model: BlockModel::Linear,
            regularizer,
            feasible: Cow::Owned(feasible),
        })
    }

    /// Standalone second-order subproblem with an explicit block Hessian.
    pub fn quadratic(
        anchor: &[f64],
        grad: &[f64],
        hess: &DMatrix<f64>,
        tau: f64,
        regularizer: Regularizer,
        feasible: FeasibleSet,
    ) -> Result<BlockSubproblem<'static>> {
        check_tau(tau)?;
        check_block_dims(anchor, grad, &feasible, &regularizer)?;
        if hess.nrows() != anchor.len() || hess.ncols() != anchor.len() {
            return Err(invalid("Hessian block does not match the block size"));
        }
        Ok(BlockSubproblem {
            index: 0,
            anchor: DVector::from_column_slice(anchor),
            grad: DVector::from_column_slice(grad),
            tau,
            kind: SurrogateKind::NewtonBlock,
            model: quadratic_model(hess.clone())?,
            regularizer,
            feasible: Cow::Owned(feasible),
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn anchor(&self) -> &DVector<f64> {
        &self.anchor
    }

    pub fn grad(&self) -> &DVector<f64> {
        &self.grad
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn kind(&self) -> SurrogateKind {
        self.kind
    }

    pub fn regularizer(&self) -> &Regularizer {
        &self.regularizer
    }

    pub fn feasible(&self) -> &FeasibleSet {
        &self.feasible
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// `P_i(u; x) − P_i(x_i; x)`.
    pub fn model_value(&self, u: &[f64]) -> f64 {
        let d = DVector::from_column_slice(u) - &self.anchor;
        match &self.model {
            BlockModel::Linear => self.grad.dot(&d),
            BlockModel::Quadratic { curvature, scale } => {
                self.grad.dot(&d) + 0.5 * scale * d.dot(&(&curvature.gram * &d))
            }
            BlockModel::Restricted {
                smooth,
                slab,
                predictor,
                ..
            } => {
                let shifted = *predictor + slab * &d;
                smooth.value_at(&shifted) - smooth.value_at(predictor)
            }
        }
    }

    /// `∇_u P_i(u; x)`.
    pub fn model_gradient(&self, u: &[f64]) -> DVector<f64> {
        match &self.model {
            BlockModel::Linear => self.grad.clone(),
            BlockModel::Quadratic { curvature, scale } => {
                let d = DVector::from_column_slice(u) - &self.anchor;
                &self.grad + (&curvature.gram * d) * *scale
            }
            BlockModel::Restricted {
                smooth,
                slab,
                predictor,
                ..
            } => {
                let d = DVector::from_column_slice(u) - &self.anchor;
                let shifted = *predictor + slab * d;
                slab.tr_mul(&smooth.loss_gradient(&shifted))
            }
        }
    }

    /// Lipschitz constant of `∇P_i(·; x)` on the block.
    pub fn model_lipschitz(&self) -> f64 {
        match &self.model {
            BlockModel::Linear => 0.0,
            BlockModel::Quadratic { curvature, scale } => scale * curvature.eigenvalues.max().max(0.0),
            BlockModel::Restricted { lipschitz, .. } => *lipschitz,
        }
    }

    /// Strong convexity modulus of the smooth part of `h̃_i`.
    pub fn strong_convexity(&self) -> f64 {
        match &self.model {
            BlockModel::Quadratic { curvature, scale } => {
                self.tau + scale * curvature.eigenvalues.min().max(0.0)
            }
            _ => self.tau,
        }
    }

    /// `h̃_i(u)` up to an additive constant; `+∞` outside `X_i`.
    pub fn objective(&self, u: &[f64]) -> f64 {
        if !self.feasible.contains(u, 0.0) {
            return f64::INFINITY;
        }
        let dist_sq: f64 = u
            .iter()
            .zip(self.anchor.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        self.model_value(u) + 0.5 * self.tau * dist_sq + self.regularizer.block_value(u)
    }

    /// Exact minimizer when a closed form (or a scalar root-find) is available.
    pub fn closed_form(&self) -> Result<Option<BlockSolution>> {
        exact::closed_form(self)
    }

    /// Minimizer of `h̃_i` to accuracy `eps`.
    ///
    /// `eps = 0` takes the closed form when one exists and otherwise runs the
    /// inner solver down to [`EXACT_INNER_TOL`]. A positive `eps` always goes
    /// through the inner solver so the returned point is genuinely inexact.
    pub fn solve(&self, eps: f64) -> Result<BlockSolution> {
        if eps > 0.0 {
            return inexact_inner_solve(self, eps);
        }
        match self.closed_form()? {
            Some(sol) => Ok(sol),
            None => inexact_inner_solve(self, EXACT_INNER_TOL),
        }
    }
}

fn quadratic_model<'a>(hess: DMatrix<f64>) -> Result<BlockModel<'a>> {
    if (&hess - hess.transpose()).amax() > 1e-10 * hess.amax().max(1.0) {
        return Err(invalid("block Hessian is not symmetric"));
    }
    let mut curvature = BlockGram::from_symmetric(hess);
    let scale = curvature.eigenvalues.amax().max(1.0);
    if curvature.min_eigenvalue() < -1e-10 * scale {
        return Err(invalid(format!(
            "block Hessian is not positive semidefinite (min eigenvalue {:e})",
            curvature.min_eigenvalue()
        )));
    }
    curvature.eigenvalues.apply(|v| *v = v.max(0.0));
    Ok(BlockModel::Quadratic {
        curvature: Cow::Owned(curvature),
        scale: 1.0,
    })
}

fn check_block_dims(anchor: &[f64], grad: &[f64], feasible: &FeasibleSet, reg: &Regularizer) -> Result<()> {
    if anchor.len() != grad.len() || anchor.is_empty() {
        return Err(invalid("anchor and gradient must be nonempty with equal length"));
    }
    feasible.validate(Some(anchor.len()))?;
    if matches!(reg, Regularizer::GroupL2 { .. }) && !feasible.is_all_space() {
        return Err(invalid("group-L2 regularization is only supported on unconstrained blocks"));
    }
    Ok(())
}
