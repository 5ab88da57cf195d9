use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "flexopt", version, about = "Parallel block solvers for sparse regression benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a sparse least squares instance with a certified optimum.
    Generate(GenerateArgs),
    /// Run one algorithm on an instance and write its trace.
    Solve(SolveArgs),
    /// Run a comparison described by a TOML run spec.
    Compare(CompareArgs),
    /// Run the built-in invariant checks.
    Verify,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Named size: low, medium, high, large, desk-low, desk-medium, desk-high.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Write into a non-empty output directory.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Fpa,
    Fista,
    Gs,
}

impl Algo {
    pub fn name(&self) -> &'static str {
        match self {
            Algo::Fpa => "fpa",
            Algo::Fista => "fista",
            Algo::Gs => "gs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurrogateArg {
    Linear,
    Exact,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauInitArg {
    Trace,
    Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionArg {
    Threshold,
    Full,
    Greedy,
}

/// Solver settings shared by the command line and the `--config` file; a
/// flag given on the command line wins over the file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverFlags {
    #[arg(long, value_enum)]
    pub algo: Option<Algo>,
    #[arg(long, value_enum)]
    pub surrogate: Option<SurrogateArg>,
    #[arg(long, value_enum)]
    pub selection: Option<SelectionArg>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long, value_enum)]
    pub tau_init: Option<TauInitArg>,
    /// τ used with `--tau-init value`.
    #[arg(long)]
    pub tau_value: Option<f64>,
    #[arg(long)]
    pub tau_budget: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Sweep cap for `gs`; same as `--max-iters` there.
    #[arg(long)]
    pub max_sweeps: Option<usize>,
    #[arg(long)]
    pub time_budget_s: Option<f64>,
    #[arg(long)]
    pub workers: Option<usize>,
}

macro_rules! prefer {
    ($a:ident, $b:ident; $($f:ident),*) => {
        SolverFlags { $($f: $a.$f.or($b.$f)),* }
    };
}

impl SolverFlags {
    pub fn over(&self, file: &SolverFlags) -> SolverFlags {
        let (a, b) = (self, file);
        prefer!(a, b; algo, surrogate, selection, rho, gamma0, theta, alpha1, alpha2, tau_init, tau_value,
            tau_budget, tol, max_iters, max_sweeps, time_budget_s, workers)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance directory.
    pub instance: PathBuf,
    #[command(flatten)]
    pub flags: SolverFlags,
    /// TOML file with the same keys as the flags (snake_case).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Trace CSV path; defaults to `<instance>/trace_<algo>.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// TOML run spec.
    pub spec: PathBuf,
    /// Output directory; overrides the spec's `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}
