use nalgebra::DVector;

use crate::error::{invalid, Result};
use crate::linalg::norm;
use crate::problem::{Anchor, BlockPartition, CompositeProblem, Regularizer};
use crate::surrogate::SurrogateKind;

use super::compute_xhat_at;

/// Slack allowed on the descent inequality.
pub const DESCENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates
/// `(x̂(y) − y)_Sᵀ ∇F(y)_S + Σ_{i∈S} [g_i(x̂_i) − g_i(y_i)] ≤ −min τ · ‖(x̂(y) − y)_S‖²`
/// with exact best responses at `y`.
pub fn verify_descent_inequality(
    problem: &CompositeProblem,
    y: &DVector<f64>,
    tau: &[f64],
    surrogate: SurrogateKind,
    selected: &[usize],
) -> Result<DescentCheck> {
    let anchor = Anchor::new(problem, y.clone())?;
    let n = problem.num_blocks();
    for &i in selected {
        problem.partition().check_index(i)?;
    }
    let xhat = compute_xhat_at(problem, &anchor, tau, surrogate, &vec![0.0; n])?;
    let reg = problem.regularizer();
    let mut lhs = 0.0;
    let mut dist_sq = 0.0;
    for &i in selected {
        let y_i = anchor.block_x(problem, i);
        let g_i = anchor.block_gradient(problem, i);
        let z = xhat[i].z.as_slice();
        for ((zj, yj), gj) in z.iter().zip(y_i).zip(g_i) {
            let d = zj - yj;
            lhs += d * gj;
            dist_sq += d * d;
        }
        lhs += reg.block_value(z) - reg.block_value(y_i);
    }
    let c_tau = tau.iter().copied().fold(f64::INFINITY, f64::min);
    let rhs = -c_tau * dist_sq;
    Ok(DescentCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + DESCENT_TOL,
    })
}

/// `‖(x̂ − x)_S‖ ≥ (ρ/N) ‖x̂ − x‖`.
pub fn verify_selection_bound(
    partition: &BlockPartition,
    rho: f64,
    xhat: &[f64],
    x: &[f64],
    selected: &[usize],
) -> bool {
    let diff: Vec<f64> = xhat.iter().zip(x).map(|(a, b)| a - b).collect();
    let full = norm(&diff);
    let on_s: f64 = selected
        .iter()
        .map(|&i| partition.block(&diff, i).iter().map(|d| d * d).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    // a few ulps of slack for the two summation orders
    on_s >= rho / partition.num_blocks() as f64 * full * (1.0 - 1e-12)
}

/// Largest violation of the L1 subgradient conditions at `x`: `|∇_jF| ≤ c`
/// where `x_j` is zero and `∇_jF + c·sign(x_j) = 0` elsewhere.
///
/// Coordinates with `|x_j| ≤ zero_tol` count as zero; an iterate produced by
/// convex-combination steps approaches zero geometrically but never lands on it.
pub fn l1_kkt_violation(problem: &CompositeProblem, x: &DVector<f64>, zero_tol: f64) -> Result<f64> {
    let c = match problem.regularizer() {
        Regularizer::L1 { weight } => *weight,
        _ => return Err(invalid("the L1 stationarity check needs an L1 regularizer")),
    };
    if (0..problem.num_blocks()).any(|i| !problem.feasible(i).is_all_space()) {
        return Err(invalid("the L1 stationarity check assumes an unconstrained problem"));
    }
    let grad = problem.gradient(x)?;
    let worst = x.iter().zip(grad.iter()).fold(0.0_f64, |w, (xj, gj)| {
        let v = if xj.abs() <= zero_tol {
            (gj.abs() - c).max(0.0)
        } else {
            (gj + c * xj.signum()).abs()
        };
        w.max(v)
    });
    Ok(worst)
}
