use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_hardy-lab");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("HARDY_LAB_SEED").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

const TWO_STEP: &str = r#"{"pieces":[{"lo":0,"hi":0.5,"coeff":2,"exp":0},{"lo":0.5,"hi":1,"coeff":1,"exp":0}]}"#;
const QUARTER: &str = r#"{"pieces":[{"lo":0,"hi":1,"coeff":1,"exp":0.25}]}"#;

#[test]
fn analyze_two_step_weight() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", TWO_STEP);
    let out = run(&["analyze", "--weight", s(&w), "--q", "2", "--family", "prefix"]);
    assert_eq!(code(&out), 0);
    let report = &json_lines(&out)[0];
    assert!((report["c"].as_f64().unwrap() - 10.0 / 9.0).abs() <= 1e-9);
    let p0 = report["p0"].as_f64().unwrap();
    assert!(p0 > 4.0 && p0 < 4.2);
    let table = report["table"].as_array().unwrap();
    assert_eq!(table.len(), 16);
    assert!(table.iter().all(|row| row["verified"] == Value::Bool(true)));
}

#[test]
fn analyze_constant_weight_has_infinite_exponent() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", r#"{"pieces":[{"lo":0,"hi":1,"coeff":3,"exp":0}]}"#);
    let out = run(&["analyze", "--weight", s(&w), "--q", "2", "--p-grid", "4"]);
    assert_eq!(code(&out), 0);
    let report = &json_lines(&out)[0];
    assert_eq!(report["c"].as_f64(), Some(1.0));
    assert_eq!(report["p0"], Value::String("inf".into()));
    assert_eq!(report["table"].as_array().unwrap().len(), 4);
}

#[test]
fn analyze_divergent_weight_exits_one() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", r#"{"pieces":[{"lo":0,"hi":1,"coeff":1,"exp":0.6}]}"#);
    let out = run(&["analyze", "--weight", s(&w), "--q", "2"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_lines(&out)[0]["status"], Value::String("divergent".into()));
}

#[test]
fn verify_theorem2_example() {
    let dir = TempDir::new().unwrap();
    let seq = write(&dir, "s.csv", "lambda,a\n1,1\n1,0\n");
    let out = run(&["verify", "theorem2", "--sequence", s(&seq), "--p", "2"]);
    assert_eq!(code(&out), 0);
    let report = &json_lines(&out)[0];
    assert_eq!(report["margin"].as_f64(), Some(0.25));
    assert_eq!(report["status"], Value::String("pass".into()));
}

#[test]
fn verify_lemma1_one_report_per_delta() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", QUARTER);
    let out = run(&["verify", "lemma1", "--weight", s(&w), "--p", "2", "--delta", "1/2", "--delta", "1"]);
    assert_eq!(code(&out), 0);
    let reports = json_lines(&out);
    assert_eq!(reports.len(), 2);
    for r in &reports {
        assert!(r["params"]["residual"].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn verify_theorem1_grid_and_bad_q() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", QUARTER);
    let out = run(&["verify", "theorem1", "--weight", s(&w), "--p", "2", "--p", "3", "--q", "1", "--q", "3/2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_lines(&out).len(), 4);
    let bad = run(&["verify", "theorem1", "--weight", s(&w), "--p", "2", "--q", "3"]);
    assert_eq!(code(&bad), 2);
    assert!(bad.stdout.is_empty());
    assert!(!bad.stderr.is_empty());
}

#[test]
fn verify_rejects_mismatched_inputs() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", QUARTER);
    assert_eq!(code(&run(&["verify", "theorem2", "--weight", s(&w), "--p", "2"])), 2);
    assert_eq!(code(&run(&["verify", "corollary1", "--p", "2"])), 2);
    let rising = write(&dir, "r.json", r#"{"pieces":[{"lo":0,"hi":0.5,"coeff":1,"exp":0},{"lo":0.5,"hi":1,"coeff":2,"exp":0}]}"#);
    assert_eq!(code(&run(&["verify", "lemma1", "--weight", s(&rising), "--p", "2"])), 2);
}

#[test]
fn malformed_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let broken = write(&dir, "w.json", r#"{"pieces":[{"lo":0,"hi":0.7,"coeff":1,"exp":0}]}"#);
    let garbage = write(&dir, "g.json", "not json");
    let seq = write(&dir, "s.csv", "lambda,a\n-1,1\n");
    assert_eq!(code(&run(&["analyze", "--weight", s(&broken), "--q", "2"])), 2);
    assert_eq!(code(&run(&["analyze", "--weight", s(&garbage), "--q", "2"])), 2);
    assert_eq!(code(&run(&["analyze", "--weight", "/no/such/file", "--q", "2"])), 2);
    assert_eq!(code(&run(&["verify", "theorem2", "--sequence", s(&seq), "--p", "2"])), 2);
    assert_eq!(code(&run(&["analyze", "--weight", s(&garbage), "--q", "x"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn extremal_scan_csv() {
    let out = run(&["extremal", "--p", "3", "--q", "2", "--f", "1", "--k-min", "1", "--k-max", "4"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,a,L,margin");
    let margins: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(margins.len(), 4);
    assert!(margins.windows(2).all(|m| m[1] < m[0]));
}

#[test]
fn extremal_identity_case_and_skipped_rows() {
    let out = run(&["extremal", "--p", "2", "--q", "1", "--k-min", "0", "--k-max", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));
}

#[test]
fn rearrange_examples() {
    let dir = TempDir::new().unwrap();
    let third = 1.0f64 / 3.0;
    let thirds = format!(
        r#"{{"pieces":[{{"lo":0,"hi":{third},"coeff":1,"exp":0}},{{"lo":{third},"hi":{},"coeff":3,"exp":0}},{{"lo":{},"hi":1,"coeff":2,"exp":0}}]}}"#,
        2.0 * third,
        2.0 * third
    );
    let w = write(&dir, "w.json", &thirds);
    let out = run(&["rearrange", "--weight", s(&w), "--q", "2"]);
    assert_eq!(code(&out), 0);
    let r = &json_lines(&out)[0];
    assert!(r["c_after"].as_f64().unwrap() <= r["c_before"].as_f64().unwrap());

    let sorted = write(&dir, "d.json", TWO_STEP);
    let r = &json_lines(&run(&["rearrange", "--weight", s(&sorted), "--q", "2"]))[0];
    assert_eq!(r["c_after"], r["c_before"]);

    let power = write(&dir, "p.json", QUARTER);
    assert_eq!(code(&run(&["rearrange", "--weight", s(&power), "--q", "2"])), 2);
}

#[test]
fn selftest_is_deterministic_and_filterable() {
    let a = run(&["selftest", "--suites", "discrete", "--seed", "7"]);
    let b = run(&["selftest", "--suites", "discrete", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let report = &json_lines(&a)[0];
    assert_eq!(report["seed"].as_u64(), Some(7));
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["suite"] == Value::String("discrete".into())));

    let from_env = Command::new(BIN)
        .args(["selftest", "--suites", "discrete"])
        .env("HARDY_LAB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(from_env.stdout, a.stdout);

    assert_eq!(code(&run(&["selftest", "--suites", "nope"])), 2);
}

#[test]
fn selftest_default_seed_passes() {
    let out = run(&["selftest"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json_lines(&out)[0]["seed"].as_u64(), Some(20240117));
}

#[test]
fn out_flag_writes_file_instead_of_stdout() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", TWO_STEP);
    let target = dir.path().join("report.json");
    let out = run(&["analyze", "--weight", s(&w), "--q", "2", "--out", s(&target)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let direct = run(&["analyze", "--weight", s(&w), "--q", "2"]);
    assert_eq!(std::fs::read(&target).unwrap(), direct.stdout);
}
