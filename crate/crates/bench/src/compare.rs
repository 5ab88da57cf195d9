use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use flexopt::instances::{generate_nesterov_lasso, load_instance, profile_params, GeneratorParams, LassoInstance};
use flexopt::solver::Trace;
use serde::Deserialize;

use crate::args::{Algo, CompareArgs, SolverFlags};
use crate::report::{gnuplot_script, merged_csv, series, threshold_csv, RunSeries};
use crate::runner::{ignored_flags, prepare_out_dir, run as run_algo};
use crate::{CliResult, Failure, EXIT_OK};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    out: Option<PathBuf>,
    #[serde(default = "one")]
    repetitions: usize,
    time_budget_s: Option<f64>,
    instance: InstanceSource,
    run: Vec<toml::Table>,
}

fn one() -> usize {
    1
}

/// Either a directory written by `generate`, or generator settings; a
/// generated instance uses `seed + rep` for repetition `rep`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceSource {
    pub path: Option<PathBuf>,
    pub profile: Option<String>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub density: Option<f64>,
    pub c: Option<f64>,
    pub scale: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct RunEntry {
    pub name: String,
    pub algo: Algo,
    pub flags: SolverFlags,
}

#[derive(Debug)]
pub struct RunSpec {
    pub out: Option<PathBuf>,
    pub repetitions: usize,
    pub instance: InstanceSource,
    pub runs: Vec<RunEntry>,
}

fn parse_algo(name: &str) -> Option<Algo> {
    match name {
        "fpa" => Some(Algo::Fpa),
        "fista" => Some(Algo::Fista),
        "gs" => Some(Algo::Gs),
        _ => None,
    }
}

impl RunSpec {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let raw: RawSpec = toml::from_str(text)?;
        if raw.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if raw.run.is_empty() {
            bail!("the spec lists no runs");
        }
        let src = &raw.instance;
        if src.path.is_some() == (src.profile.is_some() || src.m.is_some()) {
            bail!("[instance] needs exactly one of `path` or generator settings");
        }
        let mut seen = BTreeSet::new();
        let mut runs = Vec::with_capacity(raw.run.len());
        for (i, mut table) in raw.run.into_iter().enumerate() {
            let name = match table.remove("name") {
                Some(toml::Value::String(s)) => s,
                Some(_) => bail!("run {i}: `name` must be a string"),
                None => bail!("run {i}: missing `name`"),
            };
            if !seen.insert(name.clone()) {
                bail!("run name '{name}' appears twice");
            }
            let mut flags: SolverFlags = table.try_into().with_context(|| format!("run '{name}'"))?;
            let algo = flags
                .algo
                .or_else(|| parse_algo(&name))
                .ok_or_else(|| anyhow!("run '{name}': set `algo` to fpa, fista or gs"))?;
            flags.time_budget_s = flags.time_budget_s.or(raw.time_budget_s);
            runs.push(RunEntry { name, algo, flags });
        }
        Ok(Self {
            out: raw.out,
            repetitions: raw.repetitions,
            instance: raw.instance,
            runs,
        })
    }
}

fn generator_params(src: &InstanceSource, rep: usize) -> anyhow::Result<GeneratorParams> {
    let seed = src.seed.wrapping_add(rep as u64);
    let mut p = match &src.profile {
        Some(name) => profile_params(name, seed)?,
        None => match (src.m, src.n, src.density) {
            (Some(m), Some(n), Some(d)) => GeneratorParams::new(m, n, d, 1.0, seed),
            _ => bail!("[instance] needs `profile` or all of `m`, `n`, `density`"),
        },
    };
    p.m = src.m.unwrap_or(p.m);
    p.n = src.n.unwrap_or(p.n);
    p.density = src.density.unwrap_or(p.density);
    p.c = src.c.unwrap_or(p.c);
    p.scale = src.scale.unwrap_or(p.scale);
    p.validate()?;
    Ok(p)
}

fn instance_for(src: &InstanceSource, rep: usize, base: &Path) -> anyhow::Result<LassoInstance> {
    match &src.path {
        Some(path) => {
            let path = if path.is_absolute() { path.clone() } else { base.join(path) };
            load_instance(&path).with_context(|| format!("loading {}", path.display()))
        }
        None => Ok(generate_nesterov_lasso(&generator_params(src, rep)?)?),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::other)
}

pub fn run(a: &CompareArgs) -> CliResult {
    let text = fs::read_to_string(&a.spec)
        .with_context(|| format!("reading {}", a.spec.display()))
        .map_err(Failure::usage)?;
    let spec = RunSpec::parse(&text)
        .with_context(|| format!("in {}", a.spec.display()))
        .map_err(Failure::usage)?;
    let base = a.spec.parent().map(Path::to_path_buf).unwrap_or_default();
    let out = match (&a.out, &spec.out) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) if o.is_absolute() => o.clone(),
        (None, Some(o)) => base.join(o),
        (None, None) => return Err(Failure::usage(anyhow!("no output directory: set `out` or pass --out"))),
    };
    for r in &spec.runs {
        for name in ignored_flags(r.algo, &r.flags) {
            eprintln!("note: {name} has no effect on run '{}' ({})", r.name, r.algo.name());
        }
    }
    // Validate the instance settings before touching the output directory.
    if spec.instance.path.is_none() {
        generator_params(&spec.instance, 0).map_err(Failure::usage)?;
    }
    prepare_out_dir(&out, a.force)?;

    // traces[run][rep]
    let mut traces: Vec<Vec<Trace>> = vec![Vec::with_capacity(spec.repetitions); spec.runs.len()];
    let mut v_stars: Vec<Option<f64>> = Vec::with_capacity(spec.repetitions);
    for rep in 0..spec.repetitions {
        let inst = instance_for(&spec.instance, rep, &base).map_err(Failure::usage)?;
        let problem = inst.problem().map_err(Failure::usage)?;
        v_stars.push(inst.v_star);
        for (i, r) in spec.runs.iter().enumerate() {
            let result = run_algo(r.algo, &problem, &r.flags)?;
            let path = out.join(format!("{}_rep{rep}.csv", r.name));
            write(&path, &result.outcome.trace.to_csv_string())?;
            eprintln!("{} rep {rep}: {}", r.name, result.summary(r.algo.name()));
            traces[i].push(result.outcome.trace);
        }
    }

    let certified = v_stars.iter().all(Option::is_some);
    let reference: Vec<f64> = (0..spec.repetitions)
        .map(|rep| {
            v_stars[rep].filter(|_| certified).unwrap_or_else(|| {
                traces
                    .iter()
                    .flat_map(|t| t[rep].records.iter().map(|r| r.objective))
                    .fold(f64::INFINITY, f64::min)
            })
        })
        .collect();
    if !certified {
        eprintln!("warning: no certified optimal value; relative errors use the best objective found");
    }

    let runs: Vec<RunSeries> = spec
        .runs
        .iter()
        .zip(&traces)
        .map(|(r, reps)| RunSeries {
            name: &r.name,
            reps: reps.iter().zip(&reference).map(|(t, &v)| series(t, v)).collect(),
        })
        .collect();
    let warning = (!certified).then_some("v_star_best_found");
    write(&out.join("merged.csv"), &merged_csv(&runs, warning))?;
    let table = threshold_csv(&runs);
    write(&out.join("thresholds.csv"), &table)?;
    let names: Vec<&str> = spec.runs.iter().map(|r| r.name.as_str()).collect();
    write(&out.join("plot.gp"), &gnuplot_script(&names))?;

    print!("{table}");
    if let Some(note) = ordering_note(&spec.runs, &runs) {
        println!("{note}");
    }
    Ok(EXIT_OK)
}

/// Whether the first fpa run reached 1e-4 before the first gs run, on average.
fn ordering_note(entries: &[RunEntry], runs: &[RunSeries]) -> Option<String> {
    let find = |algo| entries.iter().position(|e| e.algo == algo);
    let (f, g) = (find(Algo::Fpa)?, find(Algo::Gs)?);
    let time = |i: usize| crate::report::mean_crossing(&runs[i].reps, 1e-4).0;
    Some(match (time(f), time(g)) {
        (Some(tf), Some(tg)) if tf < tg => format!("note: {} reached 1e-4 before {} ({tf:.3e} s vs {tg:.3e} s)", runs[f].name, runs[g].name),
        (Some(tf), Some(tg)) => format!("note: {} did not reach 1e-4 before {} ({tf:.3e} s vs {tg:.3e} s)", runs[f].name, runs[g].name),
        (Some(_), None) => format!("note: {} reached 1e-4 and {} did not", runs[f].name, runs[g].name),
        (None, _) => format!("note: {} did not reach 1e-4 in every repetition", runs[f].name),
    })
}
