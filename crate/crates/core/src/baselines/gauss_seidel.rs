use std::time::Instant;

use nalgebra::DVector;

use crate::error::{invalid, Result};
use crate::linalg::dist;
use crate::problem::CompositeProblem;
use crate::solver::{stationarity_residual, IterationRecord, SolveOutcome, TauInit, TerminationReason, Trace};
use crate::surrogate::{BlockSubproblem, SurrogateKind};

#[derive(Debug, Clone, PartialEq)]
pub struct GsOptions {
    pub max_sweeps: usize,
    /// Stop after a sweep in which no block moved farther than this.
    pub tolerance: f64,
    /// Fixed proximal weights; no adaptation during the run.
    pub tau_init: TauInit,
    pub time_budget_s: Option<f64>,
}

impl Default for GsOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 5000,
            tolerance: 1e-8,
            tau_init: TauInit::Trace,
            time_budget_s: None,
        }
    }
}

pub fn run_gauss_seidel(
    problem: &CompositeProblem,
    x0: &DVector<f64>,
    max_sweeps: usize,
    tol: f64,
) -> Result<SolveOutcome> {
    run_gauss_seidel_with(
        problem,
        x0,
        &GsOptions {
            max_sweeps,
            tolerance: tol,
            ..Default::default()
        },
    )
}

/// Cyclic sweeps, each block replaced by its exact best response at the
/// current, partially updated point. Row `k` holds the objective at the start
/// of sweep `k`, and the largest block move and number of moved blocks during it.
pub fn run_gauss_seidel_with(problem: &CompositeProblem, x0: &DVector<f64>, opts: &GsOptions) -> Result<SolveOutcome> {
    let start = Instant::now();
    if x0.len() != problem.dim() {
        return Err(invalid(format!("x0 has length {}, expected {}", x0.len(), problem.dim())));
    }
    if !problem.is_feasible(x0, 0.0) {
        return Err(invalid("x0 lies outside the feasible set"));
    }
    if !(opts.tolerance >= 0.0) {
        return Err(invalid("tolerance must be nonnegative"));
    }
    if !problem.smooth().is_convex() {
        return Err(invalid("Gauss-Seidel with exact block updates needs a convex loss"));
    }
    let tau = opts.tau_init.resolve(problem)?;
    let smooth = problem.smooth();
    let design = smooth.design();
    let partition = problem.partition();
    let nblocks = problem.num_blocks();
    let tau_lo = tau.iter().copied().fold(f64::INFINITY, f64::min);
    let tau_hi = tau.iter().copied().fold(0.0, f64::max);

    let mut x = x0.clone();
    let mut predictor = smooth.predictor(&x);
    let mut trace = Trace::default();
    let mut sweep = 0;
    let mut last_move = f64::NAN;

    let reason = loop {
        if sweep >= opts.max_sweeps {
            break TerminationReason::IterationCap;
        }
        if let Some(budget) = opts.time_budget_s {
            if start.elapsed().as_secs_f64() >= budget {
                break TerminationReason::TimeBudget;
            }
        }
        let objective = problem.objective_from_predictor(&x, &predictor);
        let elapsed = start.elapsed().as_secs_f64();
        let mut max_move = 0.0_f64;
        let mut changed = 0;
        for i in 0..nblocks {
            let r = partition.range(i);
            let slab = design.columns(r.start, r.len());
            let grad_i = slab.tr_mul(&smooth.loss_gradient(&predictor));
            let x_i: Vec<f64> = x.as_slice()[r.clone()].to_vec();
            let sub = BlockSubproblem::from_parts(problem, i, &x_i, grad_i, &predictor, tau[i], SurrogateKind::ExactBlock)?;
            let z = sub.solve(0.0)?.z;
            max_move = max_move.max(dist(z.as_slice(), &x_i));
            let mut moved = false;
            for (j, (zj, old)) in r.zip(z.iter().zip(&x_i)) {
                let delta = zj - old;
                if delta != 0.0 {
                    moved = true;
                    x[j] = *zj;
                    predictor.axpy(delta, &design.column(j), 1.0);
                }
            }
            if moved {
                changed += 1;
            }
        }
        last_move = max_move;
        trace.push(IterationRecord {
            k: sweep,
            objective,
            stationarity: max_move,
            selected: changed,
            gamma: 1.0,
            tau_min: tau_lo,
            tau_max: tau_hi,
            elapsed_s: elapsed,
            eps_total: 0.0,
        });
        sweep += 1;
        if max_move <= opts.tolerance {
            break TerminationReason::Converged;
        }
    };
    let predictor = smooth.predictor(&x);
    let final_objective = problem.objective_from_predictor(&x, &predictor);
    let final_stationarity = if reason == TerminationReason::Converged {
        last_move
    } else {
        stationarity_residual(problem, &x, &tau, SurrogateKind::ExactBlock)?
    };
    Ok(SolveOutcome {
        x,
        iterations: sweep,
        final_objective,
        final_stationarity,
        max_predictor_drift: 0.0,
        final_tau: tau,
        reason,
        trace,
    })
}
