//! One PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{finite_difference, golden_section_min, lasso_kkt, normal_equations, rand_matrix, rand_vector, rng, QuadraticBlock};
use flexopt::baselines::{run_fista, run_gauss_seidel};
use flexopt::control::{gamma_next, EpsilonSchedule, SelectionMode, SelectionPolicy, TauChange, TauController};
use flexopt::instances::{generate_nesterov_lasso, logistic_fixture, profile_params, LassoInstance};
use flexopt::linalg::norm;
use flexopt::problem::{BlockPartition, CompositeProblem, FeasibleSet, Regularizer, SmoothOracle};
use flexopt::solver::{
    l1_kkt_violation, run_algorithm1, run_algorithm1_observed, verify_descent_inequality, SolveOutcome, SolverConfig,
    TerminationReason,
};
use flexopt::surrogate::{
    solve_block_exact_group, solve_block_exact_lasso, solve_block_linearized, solve_block_newton, SurrogateKind,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: f64) -> Result<f64, String> {
    let t = start.elapsed().as_secs_f64();
    ensure(t < limit, || format!("took {t:.2} s, limit {limit} s"))?;
    Ok(t)
}

fn desk_high(seed: u64) -> (LassoInstance, CompositeProblem) {
    let inst = generate_nesterov_lasso(&profile_params("desk-high", seed).unwrap()).unwrap();
    let p = inst.problem().unwrap();
    (inst, p)
}

fn check_targets(out: &SolveOutcome, v_star: f64, cap: usize) -> Result<(), String> {
    ensure(out.reason == TerminationReason::Converged, || format!("stopped by {:?}", out.reason))?;
    ensure(out.iterations <= cap, || format!("{} iterations", out.iterations))?;
    ensure(out.final_stationarity <= 1e-6, || format!("M = {:e}", out.final_stationarity))?;
    ensure(out.final_objective <= v_star + 1e-6 * v_star.abs(), || {
        format!("objective {} above V* = {v_star}", out.final_objective)
    })
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = [0.0_f64; 4];
    for _ in 0..50 {
        let m = r.random_range(1..8);
        let a: Vec<f64> = (0..m).map(|_| r.random_range(-2.0..2.0)).collect();
        let res: Vec<f64> = (0..m).map(|_| r.random_range(-2.0..2.0)).collect();
        let (x, tau, c): (f64, f64, f64) = (r.random_range(-1.5..1.5), r.random_range(0.05..3.0), r.random_range(0.0..3.0));
        let got = solve_block_exact_lasso(&a, &res, x, tau, c).map_err(|e| e.to_string())?.z[0];
        let want = golden_section_min(
            |u, v| {
                let q: f64 = a.iter().zip(&res).map(|(ak, rk)| ak * (u - v) * (ak * (u + v) - 2.0 * rk)).sum();
                q + 0.5 * tau * (u - v) * (u + v - 2.0 * x) + c * (u.abs() - v.abs())
            },
            -20.0,
            20.0,
        );
        worst[0] = worst[0].max((got - want).abs());
    }
    for k in 0..50 {
        let (x, g, tau, c): (f64, f64, f64, f64) =
            (r.random_range(-1.0..1.0), r.random_range(-3.0..3.0), r.random_range(0.1..4.0), r.random_range(0.0..2.0));
        let (lo, hi) = (x - r.random_range(0.0..1.0), x + r.random_range(0.0..1.0));
        let (set, lo, hi) = if k % 2 == 0 {
            (FeasibleSet::new_box(vec![lo], vec![hi]).unwrap(), lo, hi)
        } else {
            (FeasibleSet::AllSpace, -30.0, 30.0)
        };
        let got = solve_block_linearized(&[x], &[g], tau, Regularizer::L1 { weight: c }, set)
            .map_err(|e| e.to_string())?
            .z[0];
        let want = golden_section_min(
            |u, v| (u - v) * (g + 0.5 * tau * (u + v - 2.0 * x)) + c * (u.abs() - v.abs()),
            lo,
            hi,
        );
        worst[1] = worst[1].max((got - want).abs());
    }
    for _ in 0..50 {
        let (m, ni) = (r.random_range(2..10), r.random_range(2..6));
        let slab = rand_matrix(&mut r, m, ni);
        let res = rand_vector(&mut r, m);
        let x = rand_vector(&mut r, ni);
        let (tau, c): (f64, f64) = (r.random_range(0.1..2.0), r.random_range(0.0..3.0));
        let got = solve_block_exact_group(&slab, &res, x.as_slice(), tau, c).map_err(|e| e.to_string())?.z;
        let oracle = QuadraticBlock {
            h: slab.tr_mul(&slab) * 2.0 + DMatrix::identity(ni, ni) * tau,
            g: slab.tr_mul(&(&slab * &x - &res)) * 2.0,
            anchor: x,
            c,
            group: true,
        };
        worst[2] = worst[2].max((got - oracle.long_run_minimizer(200_000)).norm());
    }
    for k in 0..50 {
        let ni = r.random_range(1..6);
        let b = rand_matrix(&mut r, ni, ni + 1);
        let h = &b * b.transpose();
        let g = rand_vector(&mut r, ni) * 2.0;
        let x = rand_vector(&mut r, ni);
        let (tau, c): (f64, f64) = (r.random_range(0.1..2.0), r.random_range(0.0..1.5));
        let (reg, group) = if k % 2 == 0 {
            (Regularizer::L1 { weight: c }, false)
        } else {
            (Regularizer::GroupL2 { weight: c }, true)
        };
        let got = solve_block_newton(x.as_slice(), g.as_slice(), &h, tau, reg, FeasibleSet::AllSpace)
            .map_err(|e| e.to_string())?
            .z;
        let oracle = QuadraticBlock {
            h: &h + DMatrix::identity(ni, ni) * tau,
            g,
            anchor: x,
            c,
            group,
        };
        worst[3] = worst[3].max((got - oracle.long_run_minimizer(200_000)).norm());
    }
    ensure(worst.iter().all(|w| *w <= 1e-8), || format!("worst gaps {worst:?}"))?;
    let t = within(start, 10.0)?;
    Ok(format!("worst gaps lasso {:.1e}, linear {:.1e}, group {:.1e}, newton {:.1e}; {t:.2} s", worst[0], worst[1], worst[2], worst[3]))
}

fn convex_instances() -> Vec<CompositeProblem> {
    let mut r = rng(2);
    let (f, y) = logistic_fixture();
    let inst = generate_nesterov_lasso(&flexopt::instances::GeneratorParams::new(30, 90, 0.1, 1.0, 2)).unwrap();
    vec![
        inst.problem().unwrap(),
        CompositeProblem::group_lasso(rand_matrix(&mut r, 25, 20), rand_vector(&mut r, 25), 0.6, BlockPartition::uniform(20, 4).unwrap())
            .unwrap(),
        CompositeProblem::new(
            BlockPartition::new(vec![2, 2]).unwrap(),
            SmoothOracle::logistic(f, y).unwrap(),
            Regularizer::GroupL2 { weight: 0.2 },
            vec![FeasibleSet::AllSpace; 2],
        )
        .unwrap(),
    ]
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let problems = convex_instances();
    let mut r = rng(3);
    let mut count = 0;
    let mut worst_margin = f64::NEG_INFINITY;
    for kind in [SurrogateKind::Linearized, SurrogateKind::ExactBlock, SurrogateKind::NewtonBlock] {
        for t in 0..34 {
            let p = &problems[t % problems.len()];
            let y = rand_vector(&mut r, p.dim()) * 2.0;
            let tau: Vec<f64> = (0..p.num_blocks()).map(|_| r.random_range(0.05..3.0)).collect();
            let mut selected: Vec<usize> = match t % 3 {
                0 => (0..p.num_blocks()).collect(),
                1 => vec![r.random_range(0..p.num_blocks())],
                _ => (0..p.num_blocks()).filter(|_| r.random_bool(0.5)).collect(),
            };
            if selected.is_empty() {
                selected.push(r.random_range(0..p.num_blocks()));
            }
            let d = verify_descent_inequality(p, &y, &tau, kind, &selected).map_err(|e| e.to_string())?;
            worst_margin = worst_margin.max(d.lhs - d.rhs);
            ensure(d.holds, || format!("{kind:?}: lhs {} > rhs {}", d.lhs, d.rhs))?;
            count += 1;
        }
    }
    let t = within(start, 30.0)?;
    Ok(format!("{count} triples, largest lhs − rhs {worst_margin:.2e}; {t:.2} s"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let profiles = ["desk-low", "desk-medium", "desk-high"];
    let (mut kkt, mut rel) = (0.0_f64, 0.0_f64);
    for k in 0..20u64 {
        let inst = generate_nesterov_lasso(&profile_params(profiles[k as usize % 3], 1000 + k).unwrap())
            .map_err(|e| e.to_string())?;
        let x = inst.x_star.as_ref().unwrap();
        kkt = kkt.max(lasso_kkt(&inst.a, &inst.b, inst.c, x, 0.0));
        let vs = inst.v_star.unwrap();
        rel = rel.max((inst.objective(x) - vs).abs() / vs.abs());
    }
    ensure(kkt <= 1e-9 && rel <= 1e-9, || format!("KKT {kkt:e}, value gap {rel:e}"))?;
    let t = within(start, 10.0)?;
    Ok(format!("20 instances, worst KKT {kkt:.1e}, worst value gap {rel:.1e}; {t:.2} s"))
}

fn mode_config(mode: SelectionMode) -> SolverConfig {
    SolverConfig {
        selection: SelectionPolicy::new(0.5, mode).unwrap(),
        ..Default::default()
    }
}

fn criterion_4() -> Outcome {
    let mut summary = Vec::new();
    for mode in [SelectionMode::ThresholdAll, SelectionMode::FullJacobi] {
        let cfg = mode_config(mode);
        let mut iters = Vec::new();
        for seed in 0..5 {
            let (inst, p) = desk_high(seed);
            let start = Instant::now();
            let out = run_algorithm1(&p, &cfg, &p.default_start()).map_err(|e| e.to_string())?;
            within(start, 60.0)?;
            check_targets(&out, inst.v_star.unwrap(), 5000).map_err(|e| format!("{mode:?} seed {seed}: {e}"))?;
            iters.push(out.iterations);
        }
        summary.push(format!("{mode:?} iterations {iters:?}"));
    }
    Ok(summary.join("; "))
}

fn criterion_5() -> Outcome {
    let mut g = 0.9;
    let mut sum = 0.0;
    for k in 1..=1_000_000u64 {
        let n = gamma_next(g, 1e-3);
        ensure(n > 0.0 && n < g, || format!("γ not decreasing at step {k}"))?;
        g = n;
        sum += g;
    }
    let asym = 1e6 * 1e-3 * g;
    ensure((0.9..=1.1).contains(&asym) && sum > 6.0, || format!("kθγ = {asym}, Σγ = {sum}"))?;

    let cfg = SolverConfig {
        epsilon: EpsilonSchedule::new(0.1, 1.0),
        max_iterations: 10_000,
        ..Default::default()
    };
    let mut iters = Vec::new();
    let mut checked = 0usize;
    for seed in 0..5 {
        let (inst, p) = desk_high(seed);
        let mut bad = None;
        let mut prev_gamma = f64::INFINITY;
        let out = run_algorithm1_observed(&p, &cfg, &p.default_start(), |v| {
            if !(v.gamma > 0.0 && v.gamma <= 1.0 && v.gamma < prev_gamma) {
                bad.get_or_insert(format!("γ sequence broken at k={}", v.k));
            }
            prev_gamma = v.gamma;
            for i in 0..v.epsilon.len() {
                let gn = norm(v.anchor.block_gradient(&p, i));
                let bound = v.gamma * 0.1 * if gn > 0.0 { 1.0f64.min(1.0 / gn) } else { 1.0 };
                if v.epsilon[i] != bound || v.updates[i].certified_accuracy > v.epsilon[i] {
                    bad.get_or_insert(format!("ε bound broken at k={}, block {i}", v.k));
                }
                checked += 1;
            }
        })
        .map_err(|e| e.to_string())?;
        if let Some(b) = bad {
            return Err(format!("seed {seed}: {b}"));
        }
        let recurrence = out.trace.records.windows(2).all(|w| w[1].gamma == gamma_next(w[0].gamma, 1e-3));
        ensure(recurrence, || format!("seed {seed}: emitted γ does not follow the recurrence"))?;
        check_targets(&out, inst.v_star.unwrap(), 10_000).map_err(|e| format!("seed {seed}: {e}"))?;
        iters.push(out.iterations);
    }
    Ok(format!("kθγ = {asym:.4} after 10⁶ steps; {checked} ε values checked; inexact iterations {iters:?}"))
}

fn criterion_6() -> Outcome {
    let mut compared = 0;
    for mode in [SelectionMode::ThresholdAll, SelectionMode::FullJacobi] {
        for seed in 0..5 {
            let (_, p) = desk_high(seed);
            let mut reference: Option<String> = None;
            for workers in [1, 2, 8] {
                let cfg = SolverConfig {
                    workers,
                    ..mode_config(mode)
                };
                let csv = run_algorithm1(&p, &cfg, &p.default_start()).map_err(|e| e.to_string())?.trace.to_csv_without_time();
                match &reference {
                    None => reference = Some(csv),
                    Some(r) => {
                        ensure(*r == csv, || format!("{mode:?} seed {seed}: {workers} workers differ"))?;
                        compared += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{compared} trace pairs bitwise identical"))
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let a = rand_matrix(&mut r, 12, 8);
    let b = rand_vector(&mut r, 12);
    let (f, y) = logistic_fixture();
    let oracles = [
        ("least squares", SmoothOracle::least_squares(a.clone(), b.clone()).unwrap(), BlockPartition::new(vec![3, 1, 4]).unwrap()),
        ("logistic", SmoothOracle::logistic(f, y).unwrap(), BlockPartition::new(vec![2, 2]).unwrap()),
        ("double well", SmoothOracle::double_well(a * 0.5, b).unwrap(), BlockPartition::uniform(8, 2).unwrap()),
    ];
    let mut worst = 0.0_f64;
    for (name, oracle, part) in oracles {
        let nb = part.num_blocks();
        let p = CompositeProblem::new(part, oracle, Regularizer::Zero, vec![FeasibleSet::AllSpace; nb]).unwrap();
        for _ in 0..20 {
            let x = rand_vector(&mut r, p.dim()) * 1.5;
            let fd = finite_difference(|v| p.smooth().eval(v), &x, 1e-6);
            for i in 0..nb {
                let g = p.eval_block_gradient(&x, i).map_err(|e| e.to_string())?;
                let range = p.partition().range(i);
                let rel = (&g - fd.rows(range.start, range.len())).norm() / g.norm().max(1.0);
                worst = worst.max(rel);
                ensure(rel <= 1e-5, || format!("{name} block {i}: relative error {rel:e}"))?;
            }
        }
    }
    Ok(format!("3 oracles × 20 points, worst relative error {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let a = rand_matrix(&mut r, 200, 100);
    let b = rand_vector(&mut r, 200);
    let xs = normal_equations(&a, &b);
    let v_star = (&a * &xs - &b).norm_squared();
    let p = CompositeProblem::new(
        BlockPartition::scalar(100).unwrap(),
        SmoothOracle::least_squares(a, b).unwrap(),
        Regularizer::Zero,
        vec![FeasibleSet::AllSpace; 100],
    )
    .unwrap();
    let x0 = DVector::zeros(100);
    let fista = run_fista(&p, &x0, 2000, 0.0).map_err(|e| e.to_string())?;
    let lip = fista.trace.records[0].tau_min;
    let d2 = (&x0 - &xs).norm_squared();
    for rec in &fista.trace.records {
        let bound = 2.0 * lip * d2 / ((rec.k + 1) as f64).powi(2);
        ensure(rec.objective - v_star <= bound + 1e-9 * v_star, || format!("FISTA bound broken at k={}", rec.k))?;
    }

    let (_, desk) = desk_high(8);
    let gs = run_gauss_seidel(&desk, &desk.default_start(), 500, 1e-8).map_err(|e| e.to_string())?;
    let rise = gs.trace.records.windows(2).map(|w| w[1].objective - w[0].objective).fold(f64::NEG_INFINITY, f64::max);
    ensure(rise <= 1e-10, || format!("GS objective rose by {rise:e}"))?;

    let toy = CompositeProblem::lasso(DMatrix::identity(2, 2), DVector::from_element(2, 1.0), 1.0).unwrap();
    let gs_toy = run_gauss_seidel(&toy, &DVector::zeros(2), 1000, 1e-12).map_err(|e| e.to_string())?;
    let fpa = run_algorithm1(&toy, &mode_config(SelectionMode::FullJacobi), &DVector::zeros(2)).map_err(|e| e.to_string())?;
    let gap = (&gs_toy.x - &fpa.x).amax();
    ensure(gap <= 1e-6, || format!("GS and the parallel solver differ by {gap:e}"))?;
    Ok(format!(
        "FISTA bound holds on {} rows; GS {} sweeps, largest rise {rise:.1e}; toy gap {gap:.1e}",
        fista.trace.len(),
        gs.iterations
    ))
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0_f64;
    let mut runs = 0;
    let configs = [
        mode_config(SelectionMode::ThresholdAll),
        mode_config(SelectionMode::FullJacobi),
        SolverConfig {
            epsilon: EpsilonSchedule::new(0.1, 1.0),
            max_iterations: 10_000,
            ..Default::default()
        },
    ];
    for cfg in &configs {
        for seed in 0..5 {
            let (inst, p) = desk_high(seed);
            let out = run_algorithm1(&p, cfg, &p.default_start()).map_err(|e| e.to_string())?;
            if out.reason != TerminationReason::Converged {
                continue;
            }
            runs += 1;
            let v = l1_kkt_violation(&p, &out.x, cfg.tolerance).map_err(|e| e.to_string())?;
            let oracle = lasso_kkt(&inst.a, &inst.b, inst.c, &out.x, cfg.tolerance);
            worst = worst.max(v).max(oracle);
            ensure(v <= 1e-6 && oracle <= 1e-6, || format!("seed {seed}: KKT violation {v:e} / {oracle:e}"))?;
        }
    }
    ensure(runs == 15, || format!("only {runs} of 15 runs converged"))?;
    Ok(format!("{runs} converged runs, worst violation {worst:.1e}"))
}

fn criterion_10() -> Outcome {
    let mut c = TauController::new(vec![1.0, 3.0], 50, 100.0).map_err(|e| e.to_string())?;
    let mut log = Vec::new();
    for k in 1..=10 {
        log.push(c.update(100.0 - k as f64));
    }
    log.push(c.update(200.0));
    let halved = log.iter().filter(|x| **x == TauChange::Halved).count();
    let doubled = log.iter().filter(|x| **x == TauChange::Doubled).count();
    ensure(halved == 1 && doubled == 1 && log[9] == TauChange::Halved && log[10] == TauChange::Doubled, || {
        format!("{log:?}")
    })?;
    let mut frozen = TauController::new(vec![1.0], 2, 0.0).map_err(|e| e.to_string())?;
    frozen.update(1.0);
    frozen.update(2.0);
    let before = frozen.tau().to_vec();
    let mut changed = false;
    for k in 0..30 {
        changed |= frozen.update(if k % 2 == 0 { 10.0 } else { -(k as f64) }) != TauChange::Unchanged;
    }
    ensure(!changed && frozen.tau() == before.as_slice(), || "τ moved after the budget ran out".into())?;
    Ok("one halving then one doubling; exhausted budget freezes τ".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("closed-form oracle equivalence", criterion_1),
        ("descent inequality", criterion_2),
        ("generator soundness", criterion_3),
        ("end-to-end convergence", criterion_4),
        ("stepsize and inexactness conditions", criterion_5),
        ("determinism across worker counts", criterion_6),
        ("gradient checks", criterion_7),
        ("baseline sanity", criterion_8),
        ("stationarity certificate", criterion_9),
        ("τ controller", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({detail})", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
