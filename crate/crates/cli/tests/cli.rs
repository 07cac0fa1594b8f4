use std::path::Path;
use std::process::{Command, Output};

use acs_cli::records::{
    read_csv_file, ConvergenceRecord, GmresRecord, RankHistoryRecord, RunSummary, RANK_HISTORY_CSV, SUMMARY_JSON,
};

fn acs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acs")).args(args).output().expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn one_step(dir: &Path) -> Output {
    acs(&[
        "run",
        "--example",
        "ex41",
        "--integrator",
        "be",
        "--n",
        "100",
        "--dt",
        "1e-3",
        "--t-final",
        "1e-3",
        "--no-timing",
        "--out",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn single_step_writes_one_history_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = one_step(dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: Vec<RankHistoryRecord> = read_csv_file(&dir.path().join(RANK_HISTORY_CSV)).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0].t - 1e-3).abs() < 1e-15);
    assert!(rows[0].residual < 1e-4);
    assert_eq!(rows[0].gmres_iters.0.len(), 1);
    let summary: RunSummary =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join(SUMMARY_JSON)).unwrap()).unwrap();
    assert_eq!(summary.steps, 1);
    assert_eq!(summary.integrator, "be");
    assert_eq!(summary.wall_time_s, None);
}

#[test]
fn reruns_without_timing_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out = acs(&[
            "run",
            "--example",
            "ex41",
            "--n",
            "48",
            "--t-final",
            "0.02",
            "--no-timing",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for file in [RANK_HISTORY_CSV, SUMMARY_JSON] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file} differs between reruns");
    }
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"example": "ex41", "integrator": "dirk3", "n": 40, "lambda_d": 500, "t_final": 1.0}"#,
    )
    .unwrap();
    let out = acs(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--dt",
        "0.01",
        "--t-final",
        "0.02",
        "--no-timing",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary: RunSummary =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join(SUMMARY_JSON)).unwrap()).unwrap();
    assert_eq!((summary.n, summary.steps), (40, 2));
    assert_eq!(summary.integrator, "dirk3");
    assert_eq!(summary.dt, 0.01);
}

#[test]
fn converge_reports_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = acs(&[
        "converge",
        "--example",
        "ex41",
        "--integrator",
        "be",
        "--n",
        "32",
        "--t-final",
        "0.1",
        "--dts",
        "0.05,0.025,0.0125",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: Vec<ConvergenceRecord> = read_csv_file(&dir.path().join("convergence.csv")).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].observed_order, None);
    for r in &rows[1..] {
        let p = r.observed_order.unwrap();
        assert!(p > 0.5 && p < 1.5, "order {p}");
    }
}

#[test]
fn gmres_study_writes_histories() {
    let dir = tempfile::tempdir().unwrap();
    let out = acs(&[
        "gmres-study",
        "--example",
        "ex41",
        "--dt",
        "0.01",
        "--ns",
        "40,80",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: Vec<GmresRecord> = read_csv_file(&dir.path().join("gmres.csv")).unwrap();
    assert!(rows.iter().any(|r| r.n == 80 && !r.preconditioned));
    assert!(rows.iter().filter(|r| r.iteration == 0).all(|r| (r.residual - 1.0).abs() < 1e-12));
}

#[test]
fn invalid_input_fails_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let cases: [(&[&str], &str); 6] = [
        (&["run", "--example", "ex41", "--dt", "0.1", "--lambda-a", "2"], "cannot be used with"),
        (&["run", "--example", "ex42", "--eps-tol", "1e-8", "--eps", "1e-6"], "eps"),
        (&["run", "--example", "ex45"], "unknown example"),
        (&["converge", "--example", "ex41", "--dts", "0.1,0.1,0.05"], "dt values must be distinct"),
        (&["complexity", "--example", "ex41", "--ns", "100"], "need ≥ 4 points"),
        (&["gmres-study", "--example", "ex41"], "usage"),
    ];
    for (args, needle) in cases {
        let mut args = args.to_vec();
        args.extend(["--out", out_dir]);
        let out = acs(&args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(stderr(&out).contains(needle), "{args:?}: {}", stderr(&out));
    }
}
