use std::path::Path;
use std::process::{Command, Output};

use cwpower::diagnostics::{parse_json_report, StopReason};

fn cwpower(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwpower"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn bounds_of_hilbert_three() {
    let out = cwpower(&["bounds", "--problem", "hilbert:3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0.783333 1.833333");
}

#[test]
fn hilbert_thousand_csv_matches_golden() {
    let out = cwpower(&["solve", "--problem", "hilbert:1000", "--output", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 9);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/hilbert1000.csv");
    assert_eq!(text, std::fs::read_to_string(golden).unwrap());
}

#[test]
fn unit_square_sc2_converges_quickly() {
    let out = cwpower(&[
        "solve",
        "--problem",
        "unit-square:0.0625",
        "--v0",
        "t-one",
        "--criterion",
        "sc2",
        "--output",
        "json",
    ]);
    assert!(out.status.success());
    let (report, _) = parse_json_report(&stdout(&out)).unwrap();
    assert_eq!(report.stop_reason, StopReason::CriterionMet);
    assert!(report.iterations <= 5);
    let exact = 0.050823666464754;
    assert!(((report.lambda - exact) / exact).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let usage = cwpower(&["solve", "--problem", "bogus"]);
    assert_eq!(usage.status.code(), Some(64));
    let usage = cwpower(&["solve", "--problem", "hilbert:4", "--v0", "t-one"]);
    assert_eq!(usage.status.code(), Some(64));
    let missing = cwpower(&["solve", "--problem", "matrix:/definitely/not/here.txt"]);
    assert_eq!(missing.status.code(), Some(66));
    let capped = cwpower(&["solve", "--problem", "hilbert:5", "--max-iters", "1"]);
    assert_eq!(capped.status.code(), Some(2));
    assert_eq!(
        cwpower(&["solve", "--problem", "hilbert:5"]).status.code(),
        Some(0)
    );
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = cwpower(&[
        "solve",
        "--problem",
        "tridiagonal:50:3",
        "--output",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("n,lambda,error,order,criterion,residual\n"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "problem = \"unit-square:1/8\"\ncriterion = \"sc1\"\neps = \"h2/10\"\nv0 = \"t-one\"\noutput = \"json\"\n",
    )
    .unwrap();
    let out = cwpower(&["solve", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let (report, _) = parse_json_report(&stdout(&out)).unwrap();
    assert!((report.epsilon - 1.0 / 640.0).abs() < 1e-18);

    let out = cwpower(&["solve", "--config", cfg.to_str().unwrap(), "--eps", "1e-12"]);
    let (report, _) = parse_json_report(&stdout(&out)).unwrap();
    assert_eq!(report.epsilon, 1e-12);

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(
        cwpower(&["solve", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(66)
    );
}

#[test]
fn matrix_file_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "2\n2 1\n1 2\n").unwrap();
    let problem = format!("matrix:{}", path.display());
    let out = cwpower(&[
        "solve",
        "--problem",
        &problem,
        "--v0",
        "file:/nope",
        "--output",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(66));
    let out = cwpower(&[
        "solve",
        "--problem",
        &problem,
        "--algo",
        "rayleigh",
        "--output",
        "json",
    ]);
    assert!(out.status.success());
    let (report, _) = parse_json_report(&stdout(&out)).unwrap();
    assert!((report.lambda - 3.0).abs() < 1e-14);
}

#[test]
fn output_is_reproducible() {
    let args = ["solve", "--problem", "l-shape:0.125", "--output", "json"];
    let (a, b) = (cwpower(&args), cwpower(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let bench = ["bench", "grid-order", "--output", "csv"];
    assert_eq!(cwpower(&bench).stdout, cwpower(&bench).stdout);
}

#[test]
fn bench_step_counts_shape() {
    let out = cwpower(&["bench", "step-counts", "--output", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[1], "4", "{line}");
    }
}
