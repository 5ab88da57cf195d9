use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use flexopt::baselines::{run_fista_with, run_gauss_seidel_with, FistaOptions, GsOptions};
use flexopt::control::{EpsilonSchedule, SelectionMode, SelectionPolicy};
use flexopt::problem::CompositeProblem;
use flexopt::solver::{run_algorithm1, SolveOutcome, SolverConfig, TauInit, TerminationReason};
use flexopt::surrogate::SurrogateKind;
use flexopt::Error;
use nalgebra::DVector;

use crate::args::{Algo, SelectionArg, SolverFlags, SurrogateArg, TauInitArg};
use crate::{Failure, EXIT_CAP, EXIT_OK};

/// Parses a TOML file holding solver flags.
pub fn read_flags_file(path: &Path) -> Result<SolverFlags, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::usage)?;
    toml::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::usage)
}

fn tau_init(flags: &SolverFlags) -> anyhow::Result<TauInit> {
    match (flags.tau_init, flags.tau_value) {
        (Some(TauInitArg::Value), Some(value)) | (None, Some(value)) => Ok(TauInit::Value { value }),
        (Some(TauInitArg::Value), None) => bail!("--tau-init value needs --tau-value"),
        (Some(TauInitArg::Trace), Some(_)) => bail!("--tau-value conflicts with --tau-init trace"),
        (_, None) => Ok(TauInit::Trace),
    }
}

pub fn solver_config(flags: &SolverFlags) -> anyhow::Result<SolverConfig> {
    let mut cfg = SolverConfig::default();
    if let Some(s) = flags.surrogate {
        cfg.surrogate = match s {
            SurrogateArg::Linear => SurrogateKind::Linearized,
            SurrogateArg::Exact => SurrogateKind::ExactBlock,
            SurrogateArg::Newton => SurrogateKind::NewtonBlock,
        };
    }
    let mode = match flags.selection {
        None | Some(SelectionArg::Threshold) => SelectionMode::ThresholdAll,
        Some(SelectionArg::Full) => SelectionMode::FullJacobi,
        Some(SelectionArg::Greedy) => SelectionMode::SingleGreedy,
    };
    cfg.selection = SelectionPolicy::new(flags.rho.unwrap_or(cfg.selection.rho), mode)?;
    cfg.gamma0 = flags.gamma0.unwrap_or(cfg.gamma0);
    cfg.theta = flags.theta.unwrap_or(cfg.theta);
    cfg.epsilon = EpsilonSchedule::new(
        flags.alpha1.unwrap_or(cfg.epsilon.alpha1),
        flags.alpha2.unwrap_or(cfg.epsilon.alpha2),
    );
    cfg.tau_init = tau_init(flags)?;
    cfg.tau_change_budget = flags.tau_budget.unwrap_or(cfg.tau_change_budget);
    cfg.tolerance = flags.tol.unwrap_or(cfg.tolerance);
    cfg.max_iterations = flags.max_iters.unwrap_or(cfg.max_iterations);
    cfg.time_budget_s = flags.time_budget_s;
    cfg.workers = flags.workers.unwrap_or(cfg.workers);
    Ok(cfg)
}

/// Names of flags set in `flags` that `algo` does not read.
pub fn ignored_flags(algo: Algo, flags: &SolverFlags) -> Vec<&'static str> {
    let mut out = Vec::new();
    let fpa_only = [
        ("surrogate", flags.surrogate.is_some()),
        ("selection", flags.selection.is_some()),
        ("rho", flags.rho.is_some()),
        ("gamma0", flags.gamma0.is_some()),
        ("theta", flags.theta.is_some()),
        ("alpha1", flags.alpha1.is_some()),
        ("alpha2", flags.alpha2.is_some()),
        ("tau-budget", flags.tau_budget.is_some()),
    ];
    if algo != Algo::Fpa {
        out.extend(fpa_only.iter().filter(|(_, set)| *set).map(|(n, _)| *n));
    }
    if algo == Algo::Fista && (flags.tau_init.is_some() || flags.tau_value.is_some()) {
        out.push("tau-init");
    }
    if algo != Algo::Gs && flags.max_sweeps.is_some() {
        out.push("max-sweeps");
    }
    if algo == Algo::Gs && flags.workers.is_some() {
        out.push("workers");
    }
    out
}

pub struct RunResult {
    pub outcome: SolveOutcome,
    pub elapsed_s: f64,
}

impl RunResult {
    pub fn exit_code(&self) -> u8 {
        match self.outcome.reason {
            TerminationReason::Converged => EXIT_OK,
            TerminationReason::IterationCap | TerminationReason::TimeBudget => EXIT_CAP,
        }
    }

    pub fn summary(&self, algo: &str) -> String {
        format!(
            "{algo},{},{:.16e},{:.16e},{:.6}",
            self.outcome.iterations, self.outcome.final_objective, self.outcome.final_stationarity, self.elapsed_s
        )
    }
}

fn classify(e: Error) -> Failure {
    match e {
        Error::InvalidArgument(_) | Error::Validation(_) | Error::Parse { .. } => Failure::usage(e),
        other => Failure::other(other),
    }
}

/// Runs `algo` from the origin.
pub fn run(algo: Algo, problem: &CompositeProblem, flags: &SolverFlags) -> Result<RunResult, Failure> {
    let x0 = DVector::zeros(problem.dim());
    let start = Instant::now();
    let outcome = match algo {
        Algo::Fpa => {
            let cfg = solver_config(flags).map_err(Failure::usage)?;
            run_algorithm1(problem, &cfg, &x0)
        }
        Algo::Fista => {
            let d = FistaOptions::default();
            let opts = FistaOptions {
                max_iterations: flags.max_iters.unwrap_or(d.max_iterations),
                tolerance: flags.tol.unwrap_or(d.tolerance),
                time_budget_s: flags.time_budget_s,
                workers: flags.workers.unwrap_or(d.workers),
            };
            run_fista_with(problem, &x0, &opts)
        }
        Algo::Gs => {
            let d = GsOptions::default();
            let opts = GsOptions {
                max_sweeps: flags.max_sweeps.or(flags.max_iters).unwrap_or(d.max_sweeps),
                tolerance: flags.tol.unwrap_or(d.tolerance),
                tau_init: tau_init(flags).map_err(Failure::usage)?,
                time_budget_s: flags.time_budget_s,
            };
            run_gauss_seidel_with(problem, &x0, &opts)
        }
    }
    .map_err(classify)?;
    Ok(RunResult {
        outcome,
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}

/// Fails with a refusal when `dir` exists, is non-empty, and `force` is off.
pub fn prepare_out_dir(dir: &Path, force: bool) -> Result<(), Failure> {
    if dir.exists() {
        if !dir.is_dir() {
            return Err(Failure::usage(anyhow!("{} exists and is not a directory", dir.display())));
        }
        let non_empty = fs::read_dir(dir)
            .with_context(|| format!("listing {}", dir.display()))
            .map_err(Failure::usage)?
            .next()
            .is_some();
        if non_empty && !force {
            return Err(Failure::refused(format!(
                "{} is not empty; pass --force to overwrite",
                dir.display()
            )));
        }
    }
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(Failure::other)
}
