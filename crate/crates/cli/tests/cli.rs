//! End-to-end tests for the `sqjacobi` binary: subcommand output, report
//! files, determinism, and the exit-code contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sqjacobi"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write_worked_example(dir: &Path) -> PathBuf {
    let path = dir.join("worked.mtx");
    std::fs::write(
        &path,
        "%%MatrixMarket matrix array real symmetric\n3 3\n1\n0\n2\n3\n0\n4\n",
    )
    .unwrap();
    path
}

fn write_diagonal(dir: &Path) -> PathBuf {
    let path = dir.join("diag.mtx");
    std::fs::write(
        &path,
        "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 2.0\n2 2 1.0\n3 3 -4.0\n",
    )
    .unwrap();
    path
}

#[test]
fn solve_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_worked_example(dir.path());
    let out = run(&["solve", input.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("5.00000000000e0"), "{text}");
    assert!(text.contains("3.00000000000e0"), "{text}");
    assert!(text.contains("0.00000000000e0"), "{text}");
    assert!(text.contains("converged: true"), "{text}");
}

#[test]
fn solve_diagonal_applies_no_rotations() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_diagonal(dir.path());
    let out = run(&["solve", input.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("rotations: 0"));
}

#[test]
fn solve_zero_sweep_budget_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_worked_example(dir.path());
    let out = run(&["solve", input.to_str().unwrap(), "--max-sweeps", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_exits_1() {
    let out = run(&["solve", "/nonexistent/matrix.mtx"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn malformed_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mtx");
    std::fs::write(&path, "%%MatrixMarket matrix array real symmetric\n3 3\n1\n2\n").unwrap();
    let out = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_worked_example(dir.path());
    let report = dir.path().join("report.json");
    let out = run(&[
        "solve",
        input.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("\"method\": \"sqrt\""), "{text}");
    assert!(text.contains("\"converged\": true"), "{text}");
    assert!(text.contains("\"n\": 3"), "{text}");
}

#[test]
fn solve_writes_csv_report_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_worked_example(dir.path());
    let report = dir.path().join("report.csv");
    let out = run(&[
        "solve",
        input.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with("sweep,psi\n"), "{csv}");
    assert!(dir.path().join("report.csv.summary.json").exists());
}

#[test]
fn compare_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_worked_example(dir.path());
    let out = run(&["compare", input.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("max eigenvalue gap"), "{text}");
    assert!(text.contains("pivot log (first sweep):"), "{text}");
    // The worked example's single effective pivot: x = -0.3 against
    // cos(2*theta)/2 = +0.3, a mirrored-quadrant pair.
    assert!(text.contains("-3.00000000e-1"), "{text}");
    assert!(text.contains("mirrored"), "{text}");
}

#[test]
fn compare_constructed_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m8.mtx");
    let gen = run(&[
        "gen",
        "--spectrum",
        "1,2,3,4,5,6,7,8",
        "--seed",
        "11",
        "--out",
        input.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let out = run(&["compare", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mtx");
    let b = dir.path().join("b.mtx");
    for path in [&a, &b] {
        let out = run(&["gen", "--n", "5", "--seed", "7", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(
        std::fs::read_to_string(&a).unwrap(),
        std::fs::read_to_string(&b).unwrap()
    );
}

#[test]
fn gen_spectrum_round_trips_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.mtx");
    let gen = run(&[
        "gen",
        "--spectrum",
        "5,3,0",
        "--seed",
        "42",
        "--out",
        input.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let out = run(&["solve", input.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("5.00000000000e0"), "{text}");
    assert!(text.contains("3.00000000000e0"), "{text}");
}

#[test]
fn gen_one_by_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.mtx");
    let out = run(&["gen", "--n", "1", "--seed", "0", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("1 1 1"), "{text}");
}

#[test]
fn gen_without_size_exits_1() {
    let out = run(&["gen", "--out", "/tmp/unused.mtx"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn trace_starts_at_initial_off_norm() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_worked_example(dir.path());
    let csv_path = dir.path().join("trace.csv");
    let out = run(&[
        "trace",
        input.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let first = csv.lines().nth(1).unwrap();
    // Initial off-norm of the worked example is sqrt(8).
    assert_eq!(first, format!("0,{:.16e}", 8.0_f64.sqrt()), "{csv}");
}

#[test]
fn trace_diagonal_input_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_diagonal(dir.path());
    let csv_path = dir.path().join("trace.csv");
    let out = run(&[
        "trace",
        input.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, vec!["k,psi", &format!("0,{:.16e}", 0.0)[..]]);
}

#[test]
fn trace_gap_one_matrix_reports_onset() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("gap1.mtx");
    let gen = run(&[
        "gen",
        "--spectrum",
        "0,1.3,2.9,4.1,5.6,7.2",
        "--seed",
        "3",
        "--out",
        input.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let csv_path = dir.path().join("trace.csv");
    let out = run(&[
        "trace",
        input.to_str().unwrap(),
        "--method",
        "givens",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.contains("# quadratic estimate: gap_delta="), "{csv}");
    assert!(csv.contains("bound=satisfied"), "{csv}");
    let onset: usize = csv
        .lines()
        .find_map(|l| l.strip_prefix("# onset="))
        .expect("onset line present")
        .parse()
        .expect("finite onset index");
    let samples = csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert!(onset < samples);
}

#[test]
fn unknown_method_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_worked_example(dir.path());
    let out = run(&["solve", input.to_str().unwrap(), "--method", "householder"]);
    assert!(!out.status.success());
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_worked_example(dir.path());
    let a = run(&["compare", input.to_str().unwrap()]);
    let b = run(&["compare", input.to_str().unwrap()]);
    assert_eq!(stdout(&a), stdout(&b));
}
