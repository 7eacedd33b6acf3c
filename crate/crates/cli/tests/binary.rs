use std::fs;
use std::process::{Command, Output};

use resq_cli::sweep::{BOUNDS_HEADER, ISOTROPIC_HEADER};

fn resq(args: &[&str]) -> Output {
    resq_env(args, &[])
}

fn resq_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_resq"));
    cmd.args(args).env_remove("RESQ_TOL").env_remove("RESQ_MAX_ITER");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn measure_examples() {
    let cases = [
        (["--state", "strange", "--set", "stab", "--measure", "dmin"], "1.000000000"),
        (["--state", "hoggar", "--set", "stab", "--measure", "ds"], "1.263034406"),
        (["--state", "bell2", "--set", "ppt", "--measure", "dmax"], "1.000000000"),
    ];
    for (args, want) in cases {
        let mut full = vec!["measure"];
        full.extend(args);
        let o = resq(&full);
        assert_eq!(code(&o), 0, "{full:?}");
        assert_eq!(stdout(&o).trim(), want, "{full:?}");
    }
    let o = resq(&["measure", "--state", "norrell", "--set", "stab3", "--measure", "rtr"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 1.0 / 3.0).abs() < 1e-8, "{v}");
}

#[test]
fn smoothing_switches_measure() {
    let o = resq(&["--json", "measure", "--state", "strange", "--set", "stab3", "--measure", "dmax", "--eps", "0.1"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"][0]["name"], "d_max_smooth");
    let x: f64 = v["results"][0]["value"].as_str().unwrap().parse().unwrap();
    assert!((x - 0.847996907).abs() < 1e-6, "{x}");
}

#[test]
fn parse_errors_exit_2() {
    for args in [
        vec!["measure", "--state", "no_such_state", "--set", "stab", "--measure", "dmin"],
        vec!["measure", "--state", "strange", "--set", "stab", "--measure", "dh", "--eps", "1.5"],
        vec!["measure", "--state", "strange", "--set", "bogus", "--measure", "dmin"],
        vec!["sweep", "bounds", "--step", "0.7", "--output", "unused.csv"],
        vec!["sweep", "bounds", "--step", "0", "--output", "unused.csv"],
    ] {
        assert_eq!(code(&resq(&args)), 2, "{args:?}");
    }
    let o = resq_env(&["measure", "--state", "strange", "--set", "stab", "--measure", "dmin"], &[("RESQ_TOL", "x")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let o = resq(&["sweep", "bounds", "--step", "0.1", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solver_failure_exits_3() {
    let o = resq_env(
        &["measure", "--state", "bell2", "--set", "ppt", "--measure", "ds"],
        &[("RESQ_MAX_ITER", "1")],
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn invalid_combinations_exit_4() {
    for args in [
        vec!["measure", "--state", "strange", "--set", "ppt", "--measure", "dmin"],
        vec!["measure", "--state", "hoggar", "--set", "stab3", "--measure", "dmin"],
        vec!["measure", "--state", "strange", "--set", "stab", "--measure", "stabnorm"],
        vec!["measure", "--state", "strange", "--set", "stab", "--measure", "gfid"],
    ] {
        assert_eq!(code(&resq(&args)), 4, "{args:?}");
    }
}

#[test]
fn json_reports_are_deterministic() {
    let args = ["--json", "measure", "--state", "hoggar", "--set", "stab", "--measure", "dmax"];
    let a = resq(&args);
    let b = resq(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["command"], "measure dmax");
    assert!(v["diagnostics"]["feas_tol"].as_f64().unwrap() > 0.0);
    assert!(v.get("wall_time_ms").is_none());
}

#[test]
fn state_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    fs::write(&path, r#"{"dims": [2], "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}"#).unwrap();
    let o = resq(&["measure", "--state", path.to_str().unwrap(), "--set", "stab", "--measure", "dmax"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "0.000000000");
}

fn read_csv(path: &std::path::Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn bounds_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    let o = resq(&["sweep", "bounds", "--step", "0.1", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&path);
    assert_eq!(header, BOUNDS_HEADER);
    // k1 + k2 < 10 with k1, k2 >= 1
    assert_eq!(rows.len(), 36);
    for r in &rows {
        let e1: f64 = r[0].parse().unwrap();
        let e2: f64 = r[1].parse().unwrap();
        assert!(e1 + e2 < 1.0);
        let lf: f64 = r[2].parse().unwrap();
        let lp: f64 = r[3].parse().unwrap();
        assert!(lf >= lp - 1e-12);
        let want = if e1 + e2.sqrt() < 1.0 { "sqrt" } else { "fallback" };
        assert_eq!(r[4], want);
    }
}

#[test]
fn coarsest_bounds_sweep_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let o = resq(&["sweep", "bounds", "--step", "0.5", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&path);
    assert_eq!(header, BOUNDS_HEADER);
    assert!(rows.is_empty());
}

#[test]
fn isotropic_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.csv");
    let o = resq(&["sweep", "isotropic", "--step", "0.25", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ISOTROPIC_HEADER);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        let delta: f64 = r[5].parse().unwrap();
        assert!(delta < 1e-6, "{r:?}");
    }
}

#[test]
fn verify_bounds_passes() {
    let o = resq(&["verify", "bounds"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn verify_isotropic_passes() {
    let o = resq(&["--json", "verify", "isotropic"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["results"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["pass"] == true && r["tolerance"].is_number()));
}

#[test]
fn fine_bounds_sweep_respects_the_ordering() {
    let rows = resq_cli::sweep::bounds_rows(0.01).unwrap();
    // k1, k2 >= 1 and k1 + k2 <= 99
    assert_eq!(rows.len(), 99 * 98 / 2);
    for r in &rows {
        let lf: f64 = r[2].parse().unwrap();
        let lp: f64 = r[3].parse().unwrap();
        assert!(lf >= lp - 1e-12, "{r:?}");
    }
}
