//! `flexopt`: generate instances, run solvers, and compare convergence traces.

mod args;
mod compare;
mod generate;
mod report;
mod runner;
mod solve;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit codes are part of the interface.
pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_REFUSED: u8 = 3;
pub const EXIT_CAP: u8 = 4;
pub const EXIT_CHECK_FAILED: u8 = 1;

/// An error paired with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_USAGE,
            error: error.into(),
        }
    }

    pub fn refused(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_REFUSED,
            error: anyhow::anyhow!(msg.into()),
        }
    }

    pub fn other(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_CHECK_FAILED,
            error: error.into(),
        }
    }
}

pub type CliResult = Result<u8, Failure>;

fn verify() -> CliResult {
    let results = flexopt::diagnostics::run_all();
    let mut failed = 0;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {}: {}", r.suite, r.name, r.detail);
        failed += usize::from(!r.passed);
    }
    println!("{} of {} checks passed", results.len() - failed, results.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate::run(&a),
        Command::Solve(a) => solve::run(&a),
        Command::Compare(a) => compare::run(&a),
        Command::Verify => verify(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            if f.code == EXIT_USAGE {
                eprintln!("run `flexopt --help` for usage");
            }
            ExitCode::from(f.code)
        }
    }
}
