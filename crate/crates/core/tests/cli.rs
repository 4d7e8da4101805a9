//! End-to-end checks of the command-line driver.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hcurl_afem::io::{parse_history_csv, parse_indicator_csv, parse_summary, parse_vtk};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcurl-afem")).args(args).output().unwrap()
}

fn path_arg(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn run_writes_history_indicators_and_vtk() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_arg(dir.path());
    let o = cli(&["run", "--benchmark", "manufactured_cube", "--estimator", "recovery", "--max-dof", "1500", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let history = parse_history_csv(&fs::read_to_string(dir.path().join("history.csv")).unwrap()).unwrap();
    assert!(history.len() >= 2);
    assert!(history.windows(2).all(|w| w[1].ndof > w[0].ndof));
    assert!(history.iter().all(|r| r.err.is_some()));

    let last = history.last().unwrap();
    let ind = parse_indicator_csv(
        &fs::read_to_string(dir.path().join(format!("indicators_level{:03}.csv", last.level))).unwrap(),
    )
    .unwrap();
    let eta = ind.iter().map(|r| r.eta_k * r.eta_k).sum::<f64>().sqrt();
    assert!((eta - last.eta).abs() <= 1e-6 * last.eta);

    let vtk = parse_vtk(&fs::read_to_string(dir.path().join(format!("level{:03}.vtk", last.level))).unwrap()).unwrap();
    assert_eq!(vtk.cells.len(), ind.len());
    assert!(vtk.cell_array("eta_K").is_some());

    let summary = parse_summary(&fs::read_to_string(dir.path().join("summary.txt")).unwrap()).unwrap();
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0].ndof, last.ndof);
}

#[test]
fn estimator_tolerance_stops_the_residual_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_arg(dir.path());
    let o = cli(&[
        "run", "--benchmark", "cube_inclusion", "--estimator", "residual", "--tol", "1.1", "--no-vtk", "--out", &out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let history = parse_history_csv(&fs::read_to_string(dir.path().join("history.csv")).unwrap()).unwrap();
    assert!(history.windows(2).all(|w| w[1].ndof > w[0].ndof));
    let (last, before) = history.split_last().unwrap();
    assert!(last.eta <= 1.1);
    assert!(before.iter().all(|r| r.eta > 1.1));
    assert!(fs::read_dir(dir.path()).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".vtk")));
}

#[test]
fn compare_estimators_tabulates_each_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_arg(dir.path());
    let o = cli(&[
        "compare-estimators", "--benchmark", "kellogg_slit", "--estimators", "recovery,zz", "--max-dof", "1400",
        "--no-vtk", "--out", &out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = parse_summary(&fs::read_to_string(dir.path().join("summary.txt")).unwrap()).unwrap();
    let names: Vec<_> = rows.iter().map(|r| r.estimator.as_str()).collect();
    assert_eq!(names, ["recovery", "zz"]);
    assert!(rows.iter().all(|r| r.rel_error.is_some()));
    assert!(dir.path().join("zz").join("history.csv").exists());
}

#[test]
fn check_assumptions_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_arg(dir.path());
    let o = cli(&["check-assumptions", "--benchmark", "cube_inclusion", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("edge patches"));
    let csv = fs::read_to_string(dir.path().join("vertex_violations.csv")).unwrap();
    assert!(csv.starts_with("kind,entity,boundary,reason,from,to"));
}

#[test]
fn verify_identity_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_arg(dir.path());
    let o = cli(&["verify-identity", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(dir.path().join("identity.csv")).unwrap().lines().count(), 11);
    assert_eq!(fs::read_to_string(dir.path().join("interp_constants.csv")).unwrap().lines().count(), 4);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small run\nbenchmark = manufactured_cube\nestimator = zz\nmax_dof = 100000\nvtk = false\n").unwrap();
    let out = path_arg(&dir.path().join("out"));
    let o = cli(&["run", "--config", &path_arg(&cfg), "--max-dof", "1500", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = parse_summary(&fs::read_to_string(dir.path().join("out").join("summary.txt")).unwrap()).unwrap();
    assert_eq!(rows[0].estimator, "zz");
    let history = parse_history_csv(&fs::read_to_string(dir.path().join("out").join("history.csv")).unwrap()).unwrap();
    // The loop stops at the first level whose DOF count reaches the budget.
    let (last, before) = history.split_last().unwrap();
    assert!(last.ndof >= 1500);
    assert!(before.iter().all(|r| r.ndof < 1500));
}

#[test]
fn invalid_input_exit_codes() {
    let bad_theta = cli(&["run", "--theta", "1.5"]);
    assert_eq!(bad_theta.status.code(), Some(2));

    let unknown = cli(&["run", "--benchmark", "no_such_problem"]);
    assert_eq!(unknown.status.code(), Some(2));

    let missing = cli(&["run", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(missing.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "benchmark manufactured_cube\n").unwrap();
    let malformed = cli(&["run", "--config", &path_arg(&cfg)]);
    assert_eq!(malformed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&malformed.stderr).contains("line 1"));
}
