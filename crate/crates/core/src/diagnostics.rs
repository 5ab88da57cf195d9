//! Quick self-checks of the solver, surrogate and instance invariants, run by
//! the `verify` subcommand.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::baselines::run_gauss_seidel;
use crate::control::{gamma_next, SelectionMode, TauChange, TauController};
use crate::error::Result;
use crate::instances::{generate_nesterov_lasso, kkt_residual, profile_params, read_matrix_market, write_matrix_market, GeneratorParams};
use crate::problem::{BlockPartition, CompositeProblem};
use crate::solver::{
    compute_xhat_parallel, l1_kkt_violation, run_algorithm1, run_algorithm1_observed, verify_descent_inequality,
    verify_selection_bound, SolverConfig, TerminationReason,
};
use crate::surrogate::{inexact_inner_solve, BlockSubproblem, SurrogateKind};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: &'static str, name: &'static str, outcome: Result<(bool, String)>) -> CheckResult {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckResult {
        suite,
        name,
        passed,
        detail,
    }
}

fn random_matrix(rng: &mut Xoshiro256PlusPlus, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
}

fn random_vector(rng: &mut Xoshiro256PlusPlus, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

fn surrogate_closed_forms() -> Result<(bool, String)> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let a = random_matrix(&mut rng, 12, 8);
        let b = random_vector(&mut rng, 12);
        let p = CompositeProblem::group_lasso(a, b, 0.3, BlockPartition::uniform(8, 4)?)?;
        let x = random_vector(&mut rng, 8);
        let anchor = crate::problem::Anchor::new(&p, x)?;
        for i in 0..2 {
            let sub = BlockSubproblem::new(&p, &anchor, i, 0.5, SurrogateKind::ExactBlock)?;
            let exact = sub.solve(0.0)?;
            let long = inexact_inner_solve(&sub, 1e-12)?;
            worst = worst.max((exact.z - long.z).norm());
        }
    }
    Ok((worst <= 1e-8, format!("max closed-form vs inner-solver gap {worst:.2e}")))
}

fn surrogate_certificates() -> Result<(bool, String)> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(12);
    let mut ok = true;
    for _ in 0..20 {
        let a = random_matrix(&mut rng, 10, 6);
        let b = random_vector(&mut rng, 10);
        let p = CompositeProblem::group_lasso(a, b, 0.2, BlockPartition::uniform(6, 3)?)?;
        let anchor = crate::problem::Anchor::new(&p, random_vector(&mut rng, 6))?;
        let sub = BlockSubproblem::new(&p, &anchor, 0, 0.3, SurrogateKind::ExactBlock)?;
        let exact = sub.solve(0.0)?;
        let approx = sub.solve(1e-3)?;
        ok &= (approx.z - exact.z).norm() <= approx.certified_accuracy.max(1e-14);
    }
    Ok((ok, "certified accuracy bounds the true distance".into()))
}

fn solver_toy() -> Result<(bool, String)> {
    let p = CompositeProblem::lasso(DMatrix::identity(2, 2), DVector::from_element(2, 1.0), 1.0)?;
    let z = compute_xhat_parallel(&p, &DVector::zeros(2), &[1.0, 1.0], SurrogateKind::ExactBlock, &[0.0, 0.0])?;
    let out = run_algorithm1(&p, &SolverConfig::default(), &DVector::zeros(2))?;
    let ok = (z[0].z[0] - 1.0 / 3.0).abs() < 1e-15
        && out.reason == TerminationReason::Converged
        && (out.x - DVector::from_element(2, 0.5)).amax() < 1e-7;
    Ok((ok, "toy best response 1/3 and limit (1/2, 1/2)".into()))
}

fn small_instance(seed: u64) -> Result<(crate::instances::LassoInstance, CompositeProblem)> {
    let inst = generate_nesterov_lasso(&GeneratorParams::new(40, 120, 0.1, 1.0, seed))?;
    let p = inst.problem()?;
    Ok((inst, p))
}

fn solver_convergence() -> Result<(bool, String)> {
    let (inst, p) = small_instance(3)?;
    let out = run_algorithm1(&p, &SolverConfig::default(), &p.default_start())?;
    let vs = inst.v_star.unwrap_or(f64::NAN);
    let kkt = l1_kkt_violation(&p, &out.x, SolverConfig::default().tolerance)?;
    let ok = out.reason == TerminationReason::Converged && out.final_objective <= vs + 1e-6 * vs.abs() && kkt <= 1e-6;
    Ok((
        ok,
        format!("{} iterations, objective gap {:.2e}, KKT {kkt:.2e}", out.iterations, out.final_objective - vs),
    ))
}

fn solver_determinism() -> Result<(bool, String)> {
    let (_, p) = small_instance(4)?;
    let mut traces = Vec::new();
    for workers in [1, 2, 4] {
        let cfg = SolverConfig {
            workers,
            ..Default::default()
        };
        traces.push(run_algorithm1(&p, &cfg, &p.default_start())?.trace.to_csv_without_time());
    }
    Ok((traces.windows(2).all(|w| w[0] == w[1]), "traces with 1, 2, 4 workers".into()))
}

fn solver_inequalities() -> Result<(bool, String)> {
    let (_, p) = small_instance(5)?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
    let tau = vec![p.trace_tau(); p.num_blocks()];
    let mut descent = true;
    for kind in [SurrogateKind::Linearized, SurrogateKind::ExactBlock, SurrogateKind::NewtonBlock] {
        for _ in 0..5 {
            let y = random_vector(&mut rng, p.dim());
            let s: Vec<usize> = (0..p.num_blocks()).filter(|_| rng.random_bool(0.3)).collect();
            descent &= verify_descent_inequality(&p, &y, &tau, kind, &s)?.holds;
        }
    }
    let mut selection = true;
    let cfg = SolverConfig {
        selection: crate::control::SelectionPolicy::new(0.5, SelectionMode::ThresholdAll)?,
        ..Default::default()
    };
    run_algorithm1_observed(&p, &cfg, &p.default_start(), |v| {
        if let Some(xhat) = v.best_response {
            if !v.selected.is_empty() {
                let flat: Vec<f64> = xhat.iter().flat_map(|s| s.z.iter().copied()).collect();
                selection &= verify_selection_bound(p.partition(), 0.5, &flat, v.anchor.x.as_slice(), v.selected);
            }
        }
    })?;
    Ok((descent && selection, format!("descent {descent}, selection {selection}")))
}

fn baseline_gs() -> Result<(bool, String)> {
    let (_, p) = small_instance(6)?;
    let out = run_gauss_seidel(&p, &p.default_start(), 500, 1e-10)?;
    let mono = out
        .trace
        .records
        .windows(2)
        .all(|w| w[1].objective <= w[0].objective + 1e-10);
    Ok((mono, format!("{} sweeps, objective non-increasing: {mono}", out.iterations)))
}

fn control_gamma() -> Result<(bool, String)> {
    let mut g = 0.9;
    let mut ok = true;
    for _ in 0..10_000 {
        let n = gamma_next(g, 1e-3);
        ok &= n > 0.0 && n < g;
        g = n;
    }
    Ok((ok, format!("γ after 10⁴ steps {g:.4e}")))
}

fn control_tau() -> Result<(bool, String)> {
    let mut ctl = TauController::new(vec![1.0], 50, 100.0)?;
    let mut changes = Vec::new();
    for k in 1..=10 {
        changes.push(ctl.update(100.0 - k as f64));
    }
    changes.push(ctl.update(1000.0));
    let halved = changes.iter().filter(|c| **c == TauChange::Halved).count();
    let doubled = changes.iter().filter(|c| **c == TauChange::Doubled).count();
    Ok((halved == 1 && doubled == 1 && ctl.tau()[0] == 1.0, format!("{halved} halving, {doubled} doubling")))
}

fn instances_kkt() -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for (k, profile) in ["desk-low", "desk-medium", "desk-high"].iter().enumerate() {
        let inst = generate_nesterov_lasso(&profile_params(profile, k as u64)?)?;
        let x = inst.x_star.as_ref().expect("generated instances carry x*");
        worst = worst.max(kkt_residual(&inst.a, &inst.b, inst.c, x));
    }
    Ok((worst <= 1e-9, format!("worst KKT residual {worst:.2e}")))
}

fn instances_round_trip() -> Result<(bool, String)> {
    let (inst, _) = small_instance(8)?;
    let mut buf = Vec::new();
    write_matrix_market(&mut buf, &inst.a)?;
    let back = read_matrix_market(buf.as_slice(), "A.mtx")?;
    let same = back.iter().zip(inst.a.iter()).all(|(x, y)| x.to_bits() == y.to_bits());
    Ok((same, "Matrix Market write/read is bit-exact".into()))
}

fn instances_determinism() -> Result<(bool, String)> {
    let p = GeneratorParams::new(30, 60, 0.2, 1.0, 99);
    let a = generate_nesterov_lasso(&p)?;
    let b = generate_nesterov_lasso(&p)?;
    Ok((a == b, "same seed gives the same instance".into()))
}

/// Runs every check; the order is fixed.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check("surrogate", "closed forms match inner solver", surrogate_closed_forms()),
        check("surrogate", "inexact certificates are sound", surrogate_certificates()),
        check("solver", "toy problem", solver_toy()),
        check("solver", "converges to certified optimum", solver_convergence()),
        check("solver", "worker-count determinism", solver_determinism()),
        check("solver", "descent and selection inequalities", solver_inequalities()),
        check("baselines", "Gauss-Seidel monotone", baseline_gs()),
        check("control", "stepsize decreasing", control_gamma()),
        check("control", "τ controller script", control_tau()),
        check("instances", "generator KKT certificate", instances_kkt()),
        check("instances", "Matrix Market round trip", instances_round_trip()),
        check("instances", "seeded determinism", instances_determinism()),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for r in super::run_all() {
            assert!(r.passed, "{}: {} ({})", r.suite, r.name, r.detail);
        }
    }
}
