use std::fs;
use std::process::Command;

use serde_json::Value;

fn symmlab() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_symmlab"));
    c.env_remove("SYMMLAB_OUT");
    c
}

fn run(args: &[&str]) -> (i32, String) {
    let out = symmlab().args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn lines(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).expect("JSON line")).collect()
}

#[test]
fn dirichlet_on_cycle_holds() {
    let (code, out) = run(&["verify-dirichlet", "--space", "cycle:8", "--samples", "100000", "--seed", "7"]);
    assert_eq!(code, 0);
    let rows = lines(&out);
    assert_eq!(rows.len(), 1);
    assert!(rows[0]["worst_margin"].as_f64().unwrap() >= -1e-9);
    assert_eq!(rows[0]["seed"], 7);
}

#[test]
fn cube_counterexample_finds_witness_for_every_order() {
    let (code, out) = run(&["counterexample", "--space", "cube", "--orders", "exhaustive"]);
    assert_eq!(code, 0);
    let row = &lines(&out)[0];
    assert_eq!(row["expect"], "fails");
    let notes: Vec<&str> = row["notes"].as_array().unwrap().iter().map(|n| n.as_str().unwrap()).collect();
    assert!(notes.contains(&"orders_tested=40320"));
    assert!(notes.contains(&"orders_violated=40320"));
}

#[test]
fn counterexample_on_a_line_is_unexpected() {
    // no violation exists on the line, so the "fails" expectation is not met
    let (code, _) = run(&["counterexample", "--space", "line:3"]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_two() {
    let typo = ["verify-conv", "--space", "line:5", "--t", "0.1,1,10", "--mode", "exhaustive-indicators", "--sampels", "3"];
    assert_eq!(run(&typo).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
    assert_eq!(run(&["verify-hl", "--space", "blob:3"]).0, 2);
    assert_eq!(run(&["verify-hl", "--mode", "sideways"]).0, 2);
    assert_eq!(run(&["verify-hl", "--samples", "0"]).0, 2);
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"type\": \"line\", \"n\": }").unwrap();
    assert_eq!(run(&["verify-hl", "--config", bad.to_str().unwrap()]).0, 2);
    let unknown = dir.path().join("problem.json");
    fs::write(&unknown, "{\"m\": \"line:3\", \"omega\": \"all\", \"colour\": 1}").unwrap();
    assert_eq!(run(&["compare-elliptic", "--config", unknown.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["verify-hl", "--config", "/nonexistent/space.json"]).0, 2);
    let no_initial = dir.path().join("elliptic.json");
    fs::write(&no_initial, "{\"m\": \"line:3\", \"omega\": \"all\", \"lam\": \"const:1\"}").unwrap();
    assert_eq!(run(&["compare-elliptic", "--config", no_initial.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["compare-parabolic", "--config", no_initial.to_str().unwrap()]).0, 2);
}

#[test]
fn space_config_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("space.json");
    fs::write(&cfg, "{\"type\": \"cycle\", \"m\": 6}").unwrap();
    let (code, out) = run(&["verify-hl", "--config", cfg.to_str().unwrap(), "--samples", "50"]);
    assert_eq!(code, 0);
    assert_eq!(lines(&out)[0]["instance"], "cycle:6");
}

#[test]
fn reports_are_byte_identical_and_env_overrides_out() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a/report.jsonl");
    let b = dir.path().join("b.jsonl");
    let flag_only = dir.path().join("unused.jsonl");
    let args = ["compare-parabolic", "--samples", "3", "--t", "0.3", "--seed", "11"];
    let st = symmlab().args(args).args(["--out", a.to_str().unwrap()]).output().unwrap();
    assert!(st.status.success());
    let st = symmlab()
        .args(args)
        .args(["--out", flag_only.to_str().unwrap(), "--jobs", "1"])
        .env("SYMMLAB_OUT", &b)
        .output()
        .unwrap();
    assert!(st.status.success());
    assert!(!flag_only.exists());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn octahedron_valid_order_is_found() {
    let (code, out) = run(&["valid-order", "--space", "octahedron"]);
    assert_eq!(code, 0);
    let rows = lines(&out);
    assert_eq!(rows[0]["order"].as_array().unwrap().len(), 6);
    assert_eq!(rows.len(), 4);
}

#[test]
fn cube_has_no_valid_order() {
    let (code, out) = run(&["valid-order", "--space", "cube"]);
    assert_eq!(code, 0);
    let rows = lines(&out);
    assert_eq!(rows[0]["expect"], "fails");
    assert!(rows[0]["order"].is_null());
}
