use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn convec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convec")).args(args).output().expect("spawn convec")
}

fn ok(args: &[&str]) -> Output {
    let out = convec(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn error_code(out: &Output) -> String {
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).expect("error JSON on stderr");
    v["error"]["code"].as_str().unwrap().to_string()
}

#[test]
fn clean_channel_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let code = fixture("worked_example_code.json");
    let (v, r, m) = (dir.path().join("v"), dir.path().join("r"), dir.path().join("m"));
    ok(&["encode", "--code", s(&code), "--message", s(&fixture("worked_example_message.txt")), "--out", s(&v)]);
    ok(&["corrupt", "--in", s(&v), "--iid", "0", "--seed", "3", "--out", s(&r)]);
    assert_eq!(std::fs::read_to_string(&v).unwrap(), std::fs::read_to_string(&r).unwrap());
    let pc = convec(&["decode", "--engine", "pc", "--code", s(&code), "--in", s(&r)]);
    assert_eq!(error_code(&pc), "no_parity_check");
    ok(&["decode", "--engine", "gm", "--code", s(&code), "--in", s(&r), "--message-out", s(&m)]);
    let got: Vec<String> = std::fs::read_to_string(&m)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    assert_eq!(got[..4], ["1 1", "0 0", "1 0", "0 1"]);
    assert!(got[4..].iter().all(|l| l == "0 0"), "{got:?}");
}

#[test]
fn reports_are_byte_identical_without_timings() {
    let dir = tempfile::tempdir().unwrap();
    let code = fixture("worked_example_code.json");
    let (v, r) = (dir.path().join("v"), dir.path().join("r"));
    ok(&["encode", "--code", s(&code), "--message", s(&fixture("worked_example_message.txt")), "--out", s(&v)]);
    ok(&["corrupt", "--in", s(&v), "--pattern", "1* 4v cyclic", "--out", s(&r)]);
    let run = |name: &str| {
        let rep = dir.path().join(name);
        ok(&["--no-timings", "decode", "--engine", "gm", "--code", s(&code), "--in", s(&r), "--report", s(&rep)]);
        std::fs::read(rep).unwrap()
    };
    let (a, b) = (run("a.json"), run("b.json"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains("wall_time_ms"));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert!(v["tool"].as_str().unwrap().starts_with("convec "));
    assert_eq!(v["input_sha256"]["code"].as_str().unwrap().len(), 64);
}

#[test]
fn iid_corruption_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let code = fixture("worked_example_code.json");
    let v = dir.path().join("v");
    ok(&["encode", "--code", s(&code), "--message", s(&fixture("worked_example_message.txt")), "--out", s(&v)]);
    let run = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        ok(&["corrupt", "--in", s(&v), "--pattern", &format!("iid 0.4 seed={seed}"), "--out", s(&out)]);
        std::fs::read_to_string(out).unwrap()
    };
    assert_eq!(run("7", "a"), run("7", "b"));
    assert_ne!(run("7", "a"), run("8", "c"));
}

#[test]
fn failures_are_json_on_stderr() {
    let out = convec(&["construct", "--n", "3", "--k", "2", "--delta", "3", "--out", "/dev/null"]);
    assert_eq!(error_code(&out), "divisibility_violated");
    let out = convec(&["corrupt", "--in", s(&fixture("worked_example_message.txt")), "--pattern", "3x", "--out", "/dev/null"]);
    assert_eq!(error_code(&out), "parse_error");
    let out = convec(&["search", "--n", "3", "--k", "1", "--delta", "2", "--q", "2", "--attempts", "50", "--out", "/dev/null"]);
    assert_eq!(error_code(&out), "search_exhausted");
}

#[test]
fn rates_table_line() {
    let out = ok(&["rates", "--n", "3", "--k", "1", "--delta", "18", "--j", "27"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "56/84 74/138 56/111");
    let out = ok(&["rates", "--n", "3", "--k", "2", "--delta", "1", "--j", "0"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1/3 — 1/6");
}

#[test]
fn constructed_code_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("c.json");
    let rep = dir.path().join("r.json");
    ok(&["construct", "--n", "3", "--k", "1", "--delta", "1", "--extension-degree", "193", "--out", s(&code)]);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&code).unwrap()).unwrap();
    assert_eq!(file["provenance"]["extension_source"], "override");
    ok(&["verify", "--code", s(&code), "--property", "mdp", "--report", s(&rep)]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
}
