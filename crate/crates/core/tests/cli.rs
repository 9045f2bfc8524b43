use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SAW: &str = r#"{"degree": 1, "vertices": [["0", "0"], ["1/2", "1/4"]]}"#;
const QUARTER: &str = r#"{"degree": 1, "vertices": [["0", "1/4"]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circrev"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decide_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let saw = write(dir.path(), "saw.json", SAW);
    let quarter = write(dir.path(), "quarter.json", QUARTER);

    let o = run(&["decide", s(&saw)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("yes (H)"));
    let o = run(&["decide", s(&quarter), "--group", "hplus"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("no (H+)"), "{}", stdout(&o));
    let o = run(&["decide", s(&quarter), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["exit_code"], code(&o));
}

#[test]
fn uncertified_rotation_is_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "r.json", r#"{"degree": 1, "vertices": [["0", "1/101"]]}"#);
    let o = run(&["decide", s(&f), "--max-period", "50", "--max-iter", "1000"]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    let o = run(&["analyze", s(&f), "--max-period", "50", "--max-iter", "1000", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rho = &v["result"]["rotation_number"];
    assert_eq!(rho["status"], "bracket");
    let out = dir.path().join("w.json");
    let o = run(&["factor", s(&f), "--max-period", "50", "--max-iter", "1000", "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn factor_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let saw = write(dir.path(), "saw.json", SAW);
    let out = dir.path().join("w.json");
    let o = run(&["factor", s(&saw), "--samples", "64", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("two_i_reversing"));

    let o = run(&["verify", s(&out)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("pass"));

    let other = write(dir.path(), "other.json", r#"{"degree": 1, "vertices": [["0", "0"], ["1/2", "1/3"]]}"#);
    let o = run(&["verify", s(&out), "--map", s(&other)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("fail"));

    // swap the target map inside the archive
    let text = fs::read_to_string(&out).unwrap().replacen("\"1/4\"", "\"1/3\"", 1);
    let tampered = write(dir.path(), "t.json", &text);
    let o = run(&["verify", s(&tampered)]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("fail: mu("));

    let o = run(&["factor", s(&saw), "--involutions", "3", "--samples", "64", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["verify", s(&out)])), 0);
}

#[test]
fn chiral_maps_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["random", "--word", "P+P+P-P+P-P-", "--seed", "3", "--out-dir", s(dir.path())]);
    assert_eq!(code(&o), 0);
    let map = dir.path().join("map-000.json");
    assert_eq!(code(&run(&["decide", s(&map)])), 1);
    let out = dir.path().join("w.json");
    let o = run(&["factor", s(&map), "--out", s(&out), "--json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["result"]["refusal"].is_string());
    assert!(!out.exists());
}

#[test]
fn random_is_deterministic() {
    let a = run(&["random", "--count", "5", "--seed", "11", "--rho", "2/5"]);
    let b = run(&["random", "--count", "5", "--seed", "11", "--rho", "2/5"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 5);
    let c = run(&["random", "--count", "5", "--seed", "12", "--rho", "2/5"]);
    assert_ne!(a.stdout, c.stdout);
    let d = run(&["random", "--degree", "-1", "--seed", "1"]);
    assert_eq!(code(&d), 0);
    assert!(stdout(&d).contains("\"degree\":-1"));
}

#[test]
fn bad_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"degree": 1, "vertices": [["0", "0"], ["1/3", "1/2"], ["2/3", "1/4"]]}"#,
    );
    let o = run(&["analyze", s(&bad)]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json") && err.contains("vertices"), "{err}");
    assert_eq!(code(&run(&["analyze", s(&dir.path().join("missing.json"))])), 3);
    assert_eq!(code(&run(&["random", "--rho", "3/2"])), 3);
}
