//! Relative-error series and time-to-threshold tables.

use std::fmt::Write as _;

use flexopt::solver::Trace;

pub const THRESHOLDS: [f64; 3] = [1e-2, 1e-4, 1e-6];

pub const MERGED_HEADER: &str = "algo,rep,k,elapsed_s,rel_error";
pub const THRESHOLD_HEADER: &str = "algo,threshold,mean_time_s,reps_reached";

pub fn rel_error(v: f64, v_star: f64) -> f64 {
    (v - v_star) / v_star.abs().max(1.0)
}

/// `(elapsed_s, rel_error)` for every row of `trace`.
pub fn series(trace: &Trace, v_star: f64) -> Vec<(f64, f64)> {
    trace
        .records
        .iter()
        .map(|r| (r.elapsed_s, rel_error(r.objective, v_star)))
        .collect()
}

/// First time the series reaches `threshold`, interpolating linearly between
/// the two bracketing rows.
pub fn crossing_time(points: &[(f64, f64)], threshold: f64) -> Option<f64> {
    let k = points.iter().position(|&(_, e)| e <= threshold)?;
    if k == 0 {
        return Some(points[0].0);
    }
    let (t0, e0) = points[k - 1];
    let (t1, e1) = points[k];
    let w = (e0 - threshold) / (e0 - e1);
    Some(t0 + w * (t1 - t0))
}

/// Mean crossing time over repetitions, or `None` unless every repetition
/// reached the threshold. Also returns how many did.
pub fn mean_crossing(reps: &[Vec<(f64, f64)>], threshold: f64) -> (Option<f64>, usize) {
    let times: Vec<f64> = reps.iter().filter_map(|p| crossing_time(p, threshold)).collect();
    let reached = times.len();
    if reached == 0 || reached < reps.len() {
        return (None, reached);
    }
    (Some(times.iter().sum::<f64>() / reached as f64), reached)
}

pub struct RunSeries<'a> {
    pub name: &'a str,
    /// One series per repetition, in repetition order.
    pub reps: Vec<Vec<(f64, f64)>>,
}

/// Long-format CSV; `warning` adds a trailing column marking every row.
pub fn merged_csv(runs: &[RunSeries], warning: Option<&str>) -> String {
    let mut out = String::from(MERGED_HEADER);
    if warning.is_some() {
        out.push_str(",warning");
    }
    out.push('\n');
    for run in runs {
        for (rep, points) in run.reps.iter().enumerate() {
            for (k, (t, e)) in points.iter().enumerate() {
                write!(out, "{},{rep},{k},{t:.9e},{e:.16e}", run.name).unwrap();
                if let Some(w) = warning {
                    write!(out, ",{w}").unwrap();
                }
                out.push('\n');
            }
        }
    }
    out
}

pub fn threshold_csv(runs: &[RunSeries]) -> String {
    let mut out = format!("{THRESHOLD_HEADER}\n");
    for run in runs {
        for thr in THRESHOLDS {
            let (mean, reached) = mean_crossing(&run.reps, thr);
            let mean = mean.map_or_else(|| "nan".to_string(), |m| format!("{m:.9e}"));
            writeln!(out, "{},{thr:e},{mean},{reached}", run.name).unwrap();
        }
    }
    out
}

/// Gnuplot script drawing the first repetition of every run from `merged.csv`.
pub fn gnuplot_script(names: &[&str]) -> String {
    let mut out = String::from(
        "set datafile separator ','\nset logscale xy\nset xlabel 'time (s)'\nset ylabel 'relative error'\nset key top right\n",
    );
    let plots: Vec<String> = names
        .iter()
        .map(|n| {
            format!(
                "'merged.csv' using (strcol(1) eq '{n}' && $2 == 0 ? $4 : 1/0):(($5 > 0) ? $5 : 1/0) with lines title '{n}'"
            )
        })
        .collect();
    writeln!(out, "plot {}", plots.join(", \\\n     ")).unwrap();
    out
}
