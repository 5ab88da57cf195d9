//! The parallel inexact block method: per-block best responses, greedy
//! selection, and a diminishing convex-combination step.

mod checks;
mod config;
mod trace;

use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::control::{
    exact_distance_bounds, projected_gradient_bounds, ErrorBoundKind, ErrorBounds, StepsizeState, TauController,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::norm;
use crate::problem::{Anchor, CompositeProblem};
use crate::surrogate::{BlockSolution, BlockSubproblem, SurrogateKind};

pub use checks::{
    l1_kkt_violation, verify_descent_inequality, verify_selection_bound, DescentCheck,
};
pub use config::{SolverConfig, TauInit};
pub use trace::{IterationRecord, TerminationReason, Trace, CSV_HEADER};

/// The cached predictor is replaced by a fresh `Dx` this often.
pub const PREDICTOR_REFRESH: usize = 100;

/// Solves every block subproblem at `anchor`; results are ordered by block index.
pub fn compute_xhat_at(
    problem: &CompositeProblem,
    anchor: &Anchor,
    tau: &[f64],
    surrogate: SurrogateKind,
    eps: &[f64],
) -> Result<Vec<BlockSolution>> {
    let n = problem.num_blocks();
    if tau.len() != n || eps.len() != n {
        return Err(invalid(format!("expected {n} τ and ε values, got {} and {}", tau.len(), eps.len())));
    }
    (0..n)
        .into_par_iter()
        .map(|i| BlockSubproblem::new(problem, anchor, i, tau[i], surrogate)?.solve(eps[i]))
        .collect()
}

/// [`compute_xhat_at`] from a bare point.
pub fn compute_xhat_parallel(
    problem: &CompositeProblem,
    x: &DVector<f64>,
    tau: &[f64],
    surrogate: SurrogateKind,
    eps: &[f64],
) -> Result<Vec<BlockSolution>> {
    let anchor = Anchor::new(problem, x.clone())?;
    compute_xhat_at(problem, &anchor, tau, surrogate, eps)
}

/// `max_i ‖x̂_i(x, τ_i) − x_i‖` with exact best responses.
pub fn stationarity_residual(
    problem: &CompositeProblem,
    x: &DVector<f64>,
    tau: &[f64],
    surrogate: SurrogateKind,
) -> Result<f64> {
    let eps = vec![0.0; problem.num_blocks()];
    let xhat = compute_xhat_parallel(problem, x, tau, surrogate, &eps)?;
    Ok(exact_distance_bounds(problem, x.as_slice(), &xhat).max)
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub x: DVector<f64>,
    pub trace: Trace,
    pub reason: TerminationReason,
    pub iterations: usize,
    pub final_objective: f64,
    pub final_stationarity: f64,
    /// Largest relative gap seen between the cached and a fresh predictor.
    pub max_predictor_drift: f64,
    pub final_tau: Vec<f64>,
}

/// Everything the orchestrator knows at iteration `k`, after selection and
/// before the update.
pub struct IterationView<'a> {
    pub k: usize,
    pub anchor: &'a Anchor,
    pub tau: &'a [f64],
    pub gamma: f64,
    pub epsilon: &'a [f64],
    /// The `z_i` actually produced, one per block.
    pub updates: &'a [BlockSolution],
    /// Exact best responses, when they were computed this iteration.
    pub best_response: Option<&'a [BlockSolution]>,
    pub errors: &'a ErrorBounds,
    pub selected: &'a [usize],
    /// Predictor drift measured on the way into this iterate, if a refresh happened.
    pub predictor_drift: Option<f64>,
}

pub fn run_algorithm1(problem: &CompositeProblem, config: &SolverConfig, x0: &DVector<f64>) -> Result<SolveOutcome> {
    run_algorithm1_observed(problem, config, x0, |_| {})
}

fn build_pool(workers: usize) -> Result<ThreadPool> {
    ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))
}

struct Step {
    updates: Vec<BlockSolution>,
    exact: Option<Vec<BlockSolution>>,
}

fn solve_blocks(
    problem: &CompositeProblem,
    anchor: &Anchor,
    tau: &[f64],
    surrogate: SurrogateKind,
    eps: &[f64],
    want_exact: bool,
) -> Result<Step> {
    let inexact = eps.iter().any(|e| *e > 0.0);
    let pairs: Vec<(BlockSolution, Option<BlockSolution>)> = (0..problem.num_blocks())
        .into_par_iter()
        .map(|i| {
            let sub = BlockSubproblem::new(problem, anchor, i, tau[i], surrogate)?;
            let z = sub.solve(eps[i])?;
            let exact = if want_exact && inexact {
                Some(if eps[i] > 0.0 { sub.solve(0.0)? } else { z.clone() })
            } else {
                None
            };
            Ok((z, exact))
        })
        .collect::<Result<_>>()?;
    if inexact {
        let (updates, exact): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let exact = exact.into_iter().collect::<Option<Vec<_>>>();
        Ok(Step { updates, exact })
    } else {
        let updates: Vec<_> = pairs.into_iter().map(|p| p.0).collect();
        Ok(Step { updates, exact: None })
    }
}

/// Runs the method, calling `observer` once per stationarity check.
pub fn run_algorithm1_observed<F>(
    problem: &CompositeProblem,
    config: &SolverConfig,
    x0: &DVector<f64>,
    mut observer: F,
) -> Result<SolveOutcome>
where
    F: FnMut(&IterationView<'_>),
{
    let start = Instant::now();
    config.validate(problem)?;
    if x0.len() != problem.dim() {
        return Err(invalid(format!("x0 has length {}, expected {}", x0.len(), problem.dim())));
    }
    if !problem.is_feasible(x0, 0.0) {
        return Err(invalid("x0 lies outside the feasible set"));
    }
    let pool = build_pool(config.workers)?;
    let smooth = problem.smooth();
    let design = smooth.design();
    let partition = problem.partition();
    let nblocks = problem.num_blocks();

    let tau0 = config.tau_init.resolve(problem)?;
    let mut anchor = pool.install(|| Anchor::new(problem, x0.clone()))?;
    let mut objective = anchor.objective(problem);
    let mut tau_ctl = TauController::new(tau0, config.tau_change_budget, objective)?;
    let mut step = StepsizeState::new(config.gamma0, config.theta)?;
    let mut trace = Trace::default();
    let mut max_drift = 0.0_f64;
    let mut pending_drift = None;
    let mut last_m = f64::NAN;
    let mut k = 0usize;

    let reason = loop {
        if k >= config.max_iterations {
            break TerminationReason::IterationCap;
        }
        if let Some(budget) = config.time_budget_s {
            if start.elapsed().as_secs_f64() >= budget {
                break TerminationReason::TimeBudget;
            }
        }
        let gamma = step.current();
        let eps: Vec<f64> = (0..nblocks)
            .map(|i| config.epsilon.epsilon_for_block(gamma, norm(anchor.block_gradient(problem, i))))
            .collect();
        let want_exact = config.error_bound == ErrorBoundKind::ExactDistance;
        let blocks = pool
            .install(|| solve_blocks(problem, &anchor, tau_ctl.tau(), config.surrogate, &eps, want_exact))
            .map_err(|e| Error::IterationFailure {
                k,
                source: Box::new(e),
                trace: trace.clone(),
            })?;
        let errors = match config.error_bound {
            ErrorBoundKind::ExactDistance => {
                let xhat = blocks.exact.as_deref().unwrap_or(&blocks.updates);
                exact_distance_bounds(problem, anchor.x.as_slice(), xhat)
            }
            ErrorBoundKind::ProjectedGradient => projected_gradient_bounds(problem, &anchor),
        };
        let m = errors.max;
        last_m = m;
        let converged = m <= config.tolerance;
        let selected = if converged {
            Vec::new()
        } else {
            config.selection.select_blocks(&errors.values, m)
        };
        let eps_total = selected.iter().map(|&i| blocks.updates[i].certified_accuracy).sum();
        trace.push(IterationRecord {
            k,
            objective,
            stationarity: m,
            selected: selected.len(),
            gamma,
            tau_min: tau_ctl.min(),
            tau_max: tau_ctl.max(),
            elapsed_s: start.elapsed().as_secs_f64(),
            eps_total,
        });
        let best_response = match (&blocks.exact, eps.iter().all(|e| *e == 0.0)) {
            (Some(exact), _) => Some(exact.as_slice()),
            (None, true) => Some(blocks.updates.as_slice()),
            (None, false) => None,
        };
        observer(&IterationView {
            k,
            anchor: &anchor,
            tau: tau_ctl.tau(),
            gamma,
            epsilon: &eps,
            updates: &blocks.updates,
            best_response,
            errors: &errors,
            selected: &selected,
            predictor_drift: pending_drift.take(),
        });
        if converged {
            break TerminationReason::Converged;
        }

        for &i in &selected {
            let range = partition.range(i);
            for (j, zj) in range.zip(blocks.updates[i].z.iter()) {
                let old = anchor.x[j];
                let new = old + gamma * (zj - old);
                anchor.x[j] = new;
                let delta = new - old;
                if delta != 0.0 {
                    anchor.predictor.axpy(delta, &design.column(j), 1.0);
                }
            }
        }
        k += 1;
        if k % PREDICTOR_REFRESH == 0 {
            let fresh = smooth.predictor(&anchor.x);
            let drift = (&fresh - &anchor.predictor).norm() / fresh.norm().max(1.0);
            max_drift = max_drift.max(drift);
            pending_drift = Some(drift);
            anchor.predictor = fresh;
        }
        pool.install(|| anchor.refresh(problem));
        objective = anchor.objective(problem);
        tau_ctl.update(objective);
        step.advance();
    };

    let final_stationarity = if reason == TerminationReason::Converged {
        last_m
    } else {
        pool.install(|| {
            let eps = vec![0.0; nblocks];
            compute_xhat_at(problem, &anchor, tau_ctl.tau(), config.surrogate, &eps)
                .map(|xhat| exact_distance_bounds(problem, anchor.x.as_slice(), &xhat).max)
        })?
    };
    Ok(SolveOutcome {
        iterations: k,
        final_objective: objective,
        final_stationarity,
        max_predictor_drift: max_drift,
        final_tau: tau_ctl.tau().to_vec(),
        reason,
        trace,
        x: anchor.x,
    })
}
