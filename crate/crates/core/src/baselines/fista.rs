use std::time::Instant;

use nalgebra::DVector;

use crate::error::{invalid, Result};
use crate::problem::CompositeProblem;
use crate::solver::{IterationRecord, SolveOutcome, TerminationReason, Trace};

use super::{pool, prox_full};

/// `t_{k+1} = (1 + √(1 + 4t_k²)) / 2`
pub fn momentum_next(t: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct FistaOptions {
    pub max_iterations: usize,
    /// Stop once `‖prox(x − ∇F(x)/L) − x‖` drops to this value.
    pub tolerance: f64,
    pub time_budget_s: Option<f64>,
    /// Threads used for the matrix-vector products.
    pub workers: usize,
}

impl Default for FistaOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            tolerance: 1e-8,
            time_budget_s: None,
            workers: 1,
        }
    }
}

pub fn run_fista(problem: &CompositeProblem, x0: &DVector<f64>, max_iter: usize, tol: f64) -> Result<SolveOutcome> {
    run_fista_with(
        problem,
        x0,
        &FistaOptions {
            max_iterations: max_iter,
            tolerance: tol,
            ..Default::default()
        },
    )
}

/// Accelerated proximal gradient without restarts. Row `k` of the trace
/// describes `x^k`; its stationarity column is the proximal-gradient residual.
pub fn run_fista_with(problem: &CompositeProblem, x0: &DVector<f64>, opts: &FistaOptions) -> Result<SolveOutcome> {
    let start = Instant::now();
    if x0.len() != problem.dim() {
        return Err(invalid(format!("x0 has length {}, expected {}", x0.len(), problem.dim())));
    }
    if !(opts.tolerance >= 0.0) {
        return Err(invalid("tolerance must be nonnegative"));
    }
    let pool = pool(opts.workers)?;
    pool.install(|| fista_loop(problem, x0, opts, start))
}

fn fista_loop(
    problem: &CompositeProblem,
    x0: &DVector<f64>,
    opts: &FistaOptions,
    start: Instant,
) -> Result<SolveOutcome> {
    let smooth = problem.smooth();
    let design = smooth.design();
    let lip = problem.estimate_lipschitz_gradient()?;
    // a zero design makes F constant; any positive step is exact
    let lip = if lip > 0.0 { lip } else { 1.0 };
    let step = 1.0 / lip;
    let nblocks = problem.num_blocks();

    if !problem.is_feasible(x0, 0.0) {
        return Err(invalid("x0 lies outside the feasible set"));
    }
    let mut x = x0.clone();
    let mut pred_x = smooth.predictor(&x);
    let mut y = x.clone();
    let mut pred_y = pred_x.clone();
    let mut t = 1.0;
    let mut trace = Trace::default();
    let mut k = 0;
    let mut last_res;

    let reason = loop {
        let objective = problem.objective_from_predictor(&x, &pred_x);
        let grad_x = crate::linalg::tr_mul_par(design, &smooth.loss_gradient(&pred_x));
        let res = (prox_full(problem, &(&x - &grad_x * step), step) - &x).norm();
        last_res = res;
        trace.push(IterationRecord {
            k,
            objective,
            stationarity: res,
            selected: nblocks,
            gamma: 1.0,
            tau_min: lip,
            tau_max: lip,
            elapsed_s: start.elapsed().as_secs_f64(),
            eps_total: 0.0,
        });
        if res <= opts.tolerance {
            break TerminationReason::Converged;
        }
        if k + 1 >= opts.max_iterations {
            k += 1;
            break TerminationReason::IterationCap;
        }
        if let Some(budget) = opts.time_budget_s {
            if start.elapsed().as_secs_f64() >= budget {
                k += 1;
                break TerminationReason::TimeBudget;
            }
        }
        let grad_y = crate::linalg::tr_mul_par(design, &smooth.loss_gradient(&pred_y));
        let x_new = prox_full(problem, &(&y - &grad_y * step), step);
        let pred_new = design * &x_new;
        let t_new = momentum_next(t);
        let beta = (t - 1.0) / t_new;
        y = &x_new + (&x_new - &x) * beta;
        pred_y = &pred_new + (&pred_new - &pred_x) * beta;
        x = x_new;
        pred_x = pred_new;
        t = t_new;
        k += 1;
    };
    let final_objective = problem.objective_from_predictor(&x, &pred_x);
    Ok(SolveOutcome {
        x,
        iterations: k,
        final_objective,
        final_stationarity: last_res,
        max_predictor_drift: 0.0,
        final_tau: vec![lip; nblocks],
        reason,
        trace,
    })
}
