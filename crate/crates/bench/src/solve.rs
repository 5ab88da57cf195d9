use std::fs::File;
use std::io::BufWriter;

use anyhow::Context;
use flexopt::instances::load_instance;

use crate::args::{Algo, SolveArgs};
use crate::runner::{ignored_flags, read_flags_file, run as run_algo};
use crate::{CliResult, Failure};

pub fn run(a: &SolveArgs) -> CliResult {
    let flags = match &a.config {
        Some(path) => a.flags.over(&read_flags_file(path)?),
        None => a.flags.clone(),
    };
    let algo = flags.algo.unwrap_or(Algo::Fpa);
    for name in ignored_flags(algo, &flags) {
        eprintln!("note: {name} has no effect on {}", algo.name());
    }
    let inst = load_instance(&a.instance)
        .with_context(|| format!("loading instance {}", a.instance.display()))
        .map_err(Failure::usage)?;
    let problem = inst.problem().map_err(Failure::usage)?;
    let result = run_algo(algo, &problem, &flags)?;

    let out = a
        .out
        .clone()
        .unwrap_or_else(|| a.instance.join(format!("trace_{}.csv", algo.name())));
    let file = File::create(&out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(Failure::other)?;
    result
        .outcome
        .trace
        .write_csv(BufWriter::new(file))
        .with_context(|| format!("writing {}", out.display()))
        .map_err(Failure::other)?;

    println!("{}", result.summary(algo.name()));
    eprintln!(
        "{} after {} iterations; trace in {}",
        result.outcome.reason.as_str(),
        result.outcome.iterations,
        out.display()
    );
    Ok(result.exit_code())
}
