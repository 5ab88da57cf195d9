use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use flexopt::instances::load_instance;
use flexopt::solver::{Trace, CSV_HEADER};
use nalgebra::DVector;
use tempfile::tempdir;

fn flexopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flexopt"))
        .args(args)
        .output()
        .expect("spawning flexopt")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn generate(dir: &Path, seed: &str) {
    let out = flexopt(&["generate", "--profile", "desk-high", "--seed", seed, "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

fn read_trace(path: &Path) -> Trace {
    Trace::read_csv(fs::read(path).unwrap().as_slice()).unwrap()
}

#[test]
fn generate_writes_instance_files() {
    let tmp = tempdir().unwrap();
    let dir = tmp.path().join("inst");
    let out = flexopt(&["generate", "--profile", "desk-high", "--seed", "7", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    for f in ["A.mtx", "b.txt", "x_star.txt", "meta.json"] {
        assert!(dir.join(f).is_file(), "{f} missing");
    }
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("kkt_residual"), "{stdout}");
    let inst = load_instance(&dir).unwrap();
    assert_eq!((inst.m(), inst.n()), (200, 1000));
    assert!(inst.v_star.is_some());
}

#[test]
fn unknown_profile_is_a_usage_error() {
    let tmp = tempdir().unwrap();
    let out = flexopt(&["generate", "--profile", "huge", "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("huge") && stderr.contains("usage"), "{stderr}");
    assert!(!tmp.path().join("x").exists());
}

#[test]
fn refuses_non_empty_out_without_force() {
    let tmp = tempdir().unwrap();
    fs::write(tmp.path().join("keep.txt"), "x").unwrap();
    let dir = tmp.path().to_str().unwrap();
    let out = flexopt(&["generate", "--profile", "desk-high", "--out", dir]);
    assert_eq!(code(&out), 3);
    assert!(!tmp.path().join("A.mtx").exists());
    let out = flexopt(&["generate", "--profile", "desk-high", "--out", dir, "--force"]);
    assert_eq!(code(&out), 0);
    assert!(tmp.path().join("A.mtx").exists());
}

#[test]
fn solve_all_algorithms_share_the_schema() {
    let tmp = tempdir().unwrap();
    let dir = tmp.path().join("inst");
    generate(&dir, "7");
    let d = dir.to_str().unwrap();

    let out = flexopt(&["solve", "--algo", "fpa", "--rho", "0.5", "--gamma0", "0.9", "--theta", "1e-3", d]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8_lossy(&out.stdout);
    let fields: Vec<&str> = summary.trim().split(',').collect();
    assert_eq!(fields.len(), 5, "{summary}");
    assert_eq!(fields[0], "fpa");
    let fpa = read_trace(&dir.join("trace_fpa.csv"));
    assert_eq!(fields[1].parse::<usize>().unwrap() + 1, fpa.len());
    assert!(fpa.last().unwrap().stationarity <= 1e-8);
    let inst = load_instance(&dir).unwrap();
    let v_star = inst.v_star.unwrap();
    assert!(fpa.last().unwrap().objective <= v_star + 1e-6 * v_star.abs());

    let out = flexopt(&["solve", "--algo", "fista", "--max-iters", "50", d]);
    assert_eq!(code(&out), 4);
    let out = flexopt(&["solve", "--algo", "gs", "--max-sweeps", "3", d]);
    assert_eq!(code(&out), 4);
    assert_eq!(read_trace(&dir.join("trace_gs.csv")).len(), 3);

    let header = |f: &str| fs::read_to_string(dir.join(f)).unwrap().lines().next().unwrap().to_string();
    for f in ["trace_fpa.csv", "trace_fista.csv", "trace_gs.csv"] {
        assert_eq!(header(f), CSV_HEADER);
    }
}

#[test]
fn solve_fista_converges_and_config_file_is_read() {
    let tmp = tempdir().unwrap();
    let dir = tmp.path().join("inst");
    generate(&dir, "1");
    let d = dir.to_str().unwrap();
    let out = flexopt(&["solve", "--algo", "fista", d]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "algo = \"fpa\"\nselection = \"full\"\nmax_iters = 4\n").unwrap();
    let trace = tmp.path().join("t.csv");
    let out = flexopt(&["solve", "--config", cfg.to_str().unwrap(), "--out", trace.to_str().unwrap(), d]);
    assert_eq!(code(&out), 4);
    let t = read_trace(&trace);
    assert_eq!(t.len(), 4);
    assert!(t.records.iter().all(|r| r.selected == 1000));

    // a flag overrides the file
    let out = flexopt(&["solve", "--config", cfg.to_str().unwrap(), "--max-iters", "2", "--out", trace.to_str().unwrap(), d]);
    assert_eq!(code(&out), 4);
    assert_eq!(read_trace(&trace).len(), 2);

    fs::write(&cfg, "algo = \"fpa\"\nbogus = 1\n").unwrap();
    let out = flexopt(&["solve", "--config", cfg.to_str().unwrap(), d]);
    assert_eq!(code(&out), 2);
}

#[test]
fn solve_input_errors_exit_2() {
    let tmp = tempdir().unwrap();
    let out = flexopt(&["solve", tmp.path().join("missing").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let dir = tmp.path().join("inst");
    generate(&dir, "2");
    let out = flexopt(&["solve", "--rho", "1.5", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let out = flexopt(&["solve", "--algo", "simplex", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let out = flexopt(&["solve", "--tau-init", "value", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn compare_writes_traces_merged_and_thresholds() {
    let tmp = tempdir().unwrap();
    let spec = tmp.path().join("spec.toml");
    fs::write(
        &spec,
        r#"
out = "cmp"
repetitions = 3
time_budget_s = 30.0

[instance]
profile = "desk-high"
seed = 11

[[run]]
name = "fpa"

[[run]]
name = "fista"

[[run]]
name = "gs"
"#,
    )
    .unwrap();
    let out = flexopt(&["compare", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let cmp = tmp.path().join("cmp");
    for name in ["fpa", "fista", "gs"] {
        for rep in 0..3 {
            assert!(cmp.join(format!("{name}_rep{rep}.csv")).is_file());
        }
    }
    assert!(cmp.join("plot.gp").is_file());

    let merged = fs::read_to_string(cmp.join("merged.csv")).unwrap();
    let mut lines = merged.lines();
    assert_eq!(lines.next().unwrap(), "algo,rep,k,elapsed_s,rel_error");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let total: usize = ["fpa", "fista", "gs"]
        .iter()
        .flat_map(|n| (0..3).map(move |r| (n, r)))
        .map(|(n, r)| read_trace(&cmp.join(format!("{n}_rep{r}.csv"))).len())
        .sum();
    assert_eq!(rows.len(), total);

    // rel_error at k = 0 from the origin is (V(0) − V*) / max(|V*|, 1) = (‖b‖² − V*) / max(|V*|, 1)
    for rep in 0..3u64 {
        let inst_dir = tmp.path().join(format!("inst{rep}"));
        generate(&inst_dir, &(11 + rep).to_string());
        let inst = load_instance(&inst_dir).unwrap();
        let v0 = inst.objective(&DVector::zeros(inst.n()));
        assert_eq!(v0, inst.b.norm_squared());
        let v_star = inst.v_star.unwrap();
        let expected = (v0 - v_star) / v_star.abs().max(1.0);
        for name in ["fpa", "fista", "gs"] {
            let row = rows
                .iter()
                .find(|r| r[0] == name && r[1] == rep.to_string() && r[2] == "0")
                .unwrap();
            let got: f64 = row[4].parse().unwrap();
            assert!((got - expected).abs() <= 1e-15 * expected.abs(), "{name} rep {rep}: {got} vs {expected}");
        }
    }

    let table = fs::read_to_string(cmp.join("thresholds.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "algo,threshold,mean_time_s,reps_reached");
    assert_eq!(lines.len(), 1 + 3 * 3);
    let fpa_1e4 = lines.iter().find(|l| l.starts_with("fpa,1e-4,")).unwrap();
    assert!(fpa_1e4.ends_with(",3"), "{fpa_1e4}");
    let mean: f64 = fpa_1e4.split(',').nth(2).unwrap().parse().unwrap();
    assert!(mean > 0.0 && mean.is_finite());

    // the output directory is now non-empty
    let out = flexopt(&["compare", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn compare_without_certified_optimum_marks_rows() {
    let tmp = tempdir().unwrap();
    let dir = tmp.path().join("inst");
    generate(&dir, "5");
    let meta = dir.join("meta.json");
    let mut json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&meta).unwrap()).unwrap();
    json.as_object_mut().unwrap().remove("v_star");
    fs::write(&meta, json.to_string()).unwrap();
    fs::remove_file(dir.join("x_star.txt")).unwrap();

    let spec = tmp.path().join("spec.toml");
    fs::write(&spec, "[instance]\npath = \"inst\"\n\n[[run]]\nname = \"fpa\"\nmax_iters = 30\n").unwrap();
    let cmp = tmp.path().join("cmp");
    let out = flexopt(&["compare", spec.to_str().unwrap(), "--out", cmp.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let merged = fs::read_to_string(cmp.join("merged.csv")).unwrap();
    assert!(merged.starts_with("algo,rep,k,elapsed_s,rel_error,warning\n"));
    let errs: Vec<f64> = merged.lines().skip(1).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert_eq!(errs.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
    assert!(merged.lines().skip(1).all(|l| l.ends_with(",v_star_best_found")));
}

#[test]
fn compare_rejects_duplicate_names() {
    let tmp = tempdir().unwrap();
    let spec = tmp.path().join("spec.toml");
    fs::write(&spec, "out = \"o\"\n[instance]\nprofile = \"desk-high\"\n[[run]]\nname = \"fpa\"\n[[run]]\nname = \"fpa\"\n").unwrap();
    let out = flexopt(&["compare", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn verify_reports_every_check() {
    let out = flexopt(&["verify"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!stdout.contains("FAIL"));
}
