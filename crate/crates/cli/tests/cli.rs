use std::path::Path;
use std::process::{Command, Output};

use opfield_cli::formats::{read_field, read_header, Header};
use opfield_cli::report::{parse_csv_report, parse_json_report, Status};

fn opfield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opfield")).args(args).output().expect("binary runs")
}

fn verify(suite: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["verify", "--suite", suite, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    opfield(&args)
}

#[test]
fn poisson_suite_reports_exact_jacobi() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("poisson.jsonl");
    let run = verify("poisson", &out, &[]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let (records, summary) = parse_json_report(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let jacobi = records.iter().find(|r| r.check == "jacobi").unwrap();
    assert_eq!((jacobi.status, jacobi.metric), (Status::Pass, Some(0.0)));
    assert_eq!(summary.fail, 0);
    assert_eq!(summary.pass, records.len());
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let run = verify("poisson", path, &["--seed", "17", "--format", "csv"]);
        assert_eq!(run.status.code(), Some(0));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let (records, summary) = parse_csv_report(&String::from_utf8(text).unwrap()).unwrap();
    assert_eq!(records.len(), summary.pass);
}

#[test]
fn horizontal_suite_marks_angular_operators_horizontal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.jsonl");
    let run = verify("horizontal", &out, &[]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let (records, _) = parse_json_report(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let r = records.iter().find(|r| r.check == "Op(a(l12)) horizontal, l12^2").unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!(r.metric.unwrap() <= 1e-8);
    assert!(records.iter().all(|r| r.status == Status::Pass));
}

#[test]
fn derivative_formula_suite_has_twelve_passing_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("xu.jsonl");
    let run = verify("theorem-xu", &out, &[]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let (records, summary) = parse_json_report(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(records.len(), 12);
    assert_eq!(summary.pass, 12);
}

#[test]
fn thresholded_failure_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.cfg");
    // the flow generator check is a finite difference, far above 1e-300
    std::fs::write(&cfg, "tol_exact = 1e-300\n").unwrap();
    let out = dir.path().join("p.jsonl");
    let run = verify("poisson", &out, &["--config", cfg.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    let (_, summary) = parse_json_report(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(summary.fail, 1);
}

#[test]
fn quantize_then_extract_fibers() {
    let dir = tempfile::tempdir().unwrap();
    let sym = dir.path().join("l12.sym");
    std::fs::write(&sym, "# n=2\nalpha=(1,0) beta=(0,1) 1 0\nalpha=(0,1) beta=(1,0) -1 0\n").unwrap();
    let op = dir.path().join("l12.bin");
    let fibers = dir.path().join("l12_fibers.bin");
    let grid = "S=33,M=16";
    let run = opfield(&[
        "quantize", "--symbol", sym.to_str().unwrap(), "--backend", "diffop", "--out", op.to_str().unwrap(), "--grid", grid,
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(matches!(read_header(&op).unwrap(), Header::Banded { bandwidth: 0, .. }));
    let run = opfield(&["fibers", "--operator", op.to_str().unwrap(), "--out", fibers.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let (field, leakage) = read_field(&fibers).unwrap();
    assert!(leakage <= 1e-12);
    assert_eq!(field.rows(), 0..33);
    // every fiber is the spectral -i d/dtheta: eigenvalue 1 on e^{i theta}
    let g = field.grid().clone();
    let v = nalgebra::DVector::from_fn(16, |j, _| num_complex::Complex64::from_polar(1.0, g.theta(j)));
    for a in field.fibers() {
        assert!((a * &v - &v).norm() <= 1e-10);
    }
}

#[test]
fn bad_input_gives_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "s_min = 3\ns_max = 1\n").unwrap();
    let out = dir.path().join("r.jsonl");
    assert_eq!(verify("poisson", &out, &["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(verify("poisson", &out, &["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(verify("nonsense", &out, &[]).status.code(), Some(2));
    assert_eq!(verify("poisson", &out, &["--grid", "S=0"]).status.code(), Some(2));
    assert_eq!(opfield(&["verify"]).status.code(), Some(2));
    let missing = dir.path().join("missing.bin");
    let run = opfield(&["fibers", "--operator", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
}
