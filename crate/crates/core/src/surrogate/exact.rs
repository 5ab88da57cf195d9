//! Closed-form block minimizers.

use nalgebra::{DMatrix, DVector};

use super::{prox_block, soft_threshold, BlockModel, BlockSolution, BlockSubproblem};
use crate::error::{invalid, Error, Result};
use crate::problem::{BlockGram, FeasibleSet, Regularizer};

const BISECTION_MAX_STEPS: usize = 400;
const GROUP_CERT_TOL: f64 = 1e-10;

pub(super) fn closed_form(sub: &BlockSubproblem<'_>) -> Result<Option<BlockSolution>> {
    let tau = sub.tau();
    let x = sub.anchor();
    let g = sub.grad();
    match &sub.model {
        BlockModel::Linear => {
            if tau <= 0.0 {
                return Err(invalid("linearized subproblem needs τ > 0"));
            }
            let v = x - g / tau;
            let z = prox_block(sub.regularizer(), sub.feasible(), v.as_slice(), 1.0 / tau);
            Ok(Some(BlockSolution::exact(z)))
        }
        BlockModel::Quadratic { curvature, scale } if sub.dim() == 1 => {
            let d = scale * curvature.gram[(0, 0)] + tau;
            if d <= 0.0 {
                return Err(Error::DegenerateSubproblem(
                    "zero curvature with τ = 0 in a scalar block".into(),
                ));
            }
            let linear = d * x[0] - g[0];
            let u = scalar_minimizer(sub.regularizer(), d, linear);
            let u = sub.feasible().clamp_coord(0, u);
            Ok(Some(BlockSolution::exact(DVector::from_element(1, u))))
        }
        BlockModel::Quadratic { curvature, scale } => {
            let eigenvalues = curvature.eigenvalues.map(|l| scale * l + tau);
            let vectors = &curvature.eigenvectors;
            match (sub.regularizer(), sub.feasible()) {
                (Regularizer::Zero, FeasibleSet::AllSpace) => {
                    Ok(Some(BlockSolution::exact(x - eigen_solve(&eigenvalues, vectors, g)?)))
                }
                (Regularizer::GroupL2 { weight }, FeasibleSet::AllSpace) => {
                    // q = (H + τI)x − g
                    let hx = vectors * DVector::from_fn(x.len(), |j, _| {
                        eigenvalues[j] * vectors.column(j).dot(x)
                    });
                    let q = hx - g;
                    quadratic_group(&eigenvalues, vectors, &q, *weight).map(Some)
                }
                _ => Ok(None),
            }
        }
        BlockModel::Restricted { .. } => Ok(None),
    }
}

/// `argmin (d/2)u² − linear·u + g(u)` for a scalar block.
fn scalar_minimizer(reg: &Regularizer, d: f64, linear: f64) -> f64 {
    match *reg {
        Regularizer::Zero => linear / d,
        Regularizer::L1 { weight } | Regularizer::GroupL2 { weight } => soft_threshold(linear, weight) / d,
    }
}

/// `(VΛVᵀ)⁻¹ g`.
fn eigen_solve(eigenvalues: &DVector<f64>, vectors: &DMatrix<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
    if eigenvalues.min() <= 0.0 {
        return Err(Error::DegenerateSubproblem(
            "singular block curvature with τ = 0".into(),
        ));
    }
    let coeffs = vectors.tr_mul(g).component_div(eigenvalues);
    Ok(vectors * coeffs)
}

/// `argmin ½uᵀHu − qᵀu + c‖u‖₂` with `H = V diag(λ) Vᵀ` positive definite.
///
/// A nonzero minimizer satisfies `(H + (c/s)I)u = q` with `s = ‖u‖`. Writing
/// `ψ(s) = ‖(λs + c)⁻¹ ∘ Vᵀq‖`, the root `ψ(s) = 1` is unique since `ψ`
/// decreases, with `ψ(0) = ‖q‖/c > 1` and `ψ(‖q‖/λ_min) < 1`.
fn quadratic_group(
    eigenvalues: &DVector<f64>,
    vectors: &DMatrix<f64>,
    q: &DVector<f64>,
    c: f64,
) -> Result<BlockSolution> {
    let n = q.len();
    let qn = q.norm();
    if qn <= c {
        return Ok(BlockSolution::exact(DVector::zeros(n)));
    }
    let lam_min = eigenvalues.min();
    if lam_min <= 0.0 {
        return Err(Error::DegenerateSubproblem(
            "singular block curvature with τ = 0".into(),
        ));
    }
    let qt = vectors.tr_mul(q);
    let psi = |s: f64| -> f64 {
        qt.iter()
            .zip(eigenvalues.iter())
            .map(|(qj, lj)| {
                let t = qj / (lj * s + c);
                t * t
            })
            .sum::<f64>()
            .sqrt()
    };
    let mut lo = 0.0;
    let mut hi = qn / lam_min;
    if !(psi(lo) > 1.0 && psi(hi) < 1.0) {
        return Err(Error::NumericFailure {
            message: "group root-finder lost its bracket".into(),
            best: hi,
        });
    }
    for _ in 0..BISECTION_MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let ut = DVector::from_fn(n, |j, _| qt[j] * s / (eigenvalues[j] * s + c));
    let un = ut.norm();
    // subgradient of the objective at u, in the eigenbasis
    let w = DVector::from_fn(n, |j, _| eigenvalues[j] * ut[j] - qt[j] + c * ut[j] / un);
    let certificate = w.norm() / lam_min;
    if !(certificate <= GROUP_CERT_TOL * un.max(1.0)) {
        return Err(Error::NumericFailure {
            message: "group root-finder could not certify its solution".into(),
            best: certificate,
        });
    }
    Ok(BlockSolution {
        z: vectors * ut,
        certified_accuracy: certificate,
        inner_iterations: 0,
    })
}

/// Exact Lasso update for a scalar block:
/// `argmin_u ‖a u − r‖² + (τ/2)(u − x)² + c|u|` with `r = b − A_{−i}x_{−i}`,
/// which is `soft(2aᵀr + τx, c) / (2‖a‖² + τ)`.
pub fn solve_block_exact_lasso(
    column: &[f64],
    residual: &[f64],
    anchor: f64,
    tau: f64,
    c: f64,
) -> Result<BlockSolution> {
    if column.len() != residual.len() {
        return Err(invalid("column and residual lengths differ"));
    }
    if !(tau >= 0.0) || !(c >= 0.0) {
        return Err(invalid("τ and c must be nonnegative"));
    }
    let a_sq: f64 = column.iter().map(|v| v * v).sum();
    let a_r: f64 = column.iter().zip(residual).map(|(a, r)| a * r).sum();
    let d = 2.0 * a_sq + tau;
    if d <= 0.0 {
        return Err(Error::DegenerateSubproblem("zero column with τ = 0".into()));
    }
    let z = soft_threshold(2.0 * a_r + tau * anchor, c) / d;
    Ok(BlockSolution::exact(DVector::from_element(1, z)))
}

/// Exact group-Lasso update:
/// `argmin_u ‖A_i u − r‖² + (τ/2)‖u − x_i‖² + c‖u‖₂`.
pub fn solve_block_exact_group(
    slab: &DMatrix<f64>,
    residual: &DVector<f64>,
    anchor: &[f64],
    tau: f64,
    c: f64,
) -> Result<BlockSolution> {
    if slab.nrows() != residual.len() || slab.ncols() != anchor.len() {
        return Err(invalid("block columns, residual and anchor disagree in shape"));
    }
    if !(tau >= 0.0) || !(c >= 0.0) {
        return Err(invalid("τ and c must be nonnegative"));
    }
    let gram = BlockGram::from_symmetric(slab.tr_mul(slab) * 2.0);
    let eigenvalues = gram.eigenvalues.map(|l| l.max(0.0) + tau);
    let x = DVector::from_column_slice(anchor);
    let q = slab.tr_mul(residual) * 2.0 + x * tau;
    quadratic_group(&eigenvalues, &gram.eigenvectors, &q, c)
}

/// Proximal-linear update `prox_{g/τ, X}(x_i − ∇_iF/τ)`.
pub fn solve_block_linearized(
    anchor: &[f64],
    grad: &[f64],
    tau: f64,
    reg: Regularizer,
    feasible: FeasibleSet,
) -> Result<BlockSolution> {
    if !(tau > 0.0) {
        return Err(invalid(format!("linearized update needs τ > 0, got {tau}")));
    }
    let sub = BlockSubproblem::linearized(anchor, grad, tau, reg, feasible)?;
    Ok(closed_form(&sub)?.expect("linear model always has a closed form"))
}

/// Second-order update with block Hessian `hess`; falls back to the certified
/// inner solver when no closed form applies (L1 on blocks wider than one).
pub fn solve_block_newton(
    anchor: &[f64],
    grad: &[f64],
    hess: &DMatrix<f64>,
    tau: f64,
    reg: Regularizer,
    feasible: FeasibleSet,
) -> Result<BlockSolution> {
    let sub = BlockSubproblem::quadratic(anchor, grad, hess, tau, reg, feasible)?;
    sub.solve(0.0)
}
