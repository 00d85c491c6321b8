use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn aifm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aifm"))
        .args(args)
        .current_dir(dir)
        .env_remove("AIFM_CAP")
        .output()
        .expect("binary runs")
}

fn body(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Writes the output of `args` to `name` inside `dir`.
fn save(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let out = aifm(dir, args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.join(name);
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

fn fig3(dir: &TempDir) {
    save(dir.path(), "fig3.json", &["fixtures", "--name", "fig3"]);
    save(dir.path(), "mmax.json", &["fixtures", "--name", "fig3", "--emit", "max"]);
    save(dir.path(), "trivial.json", &["fixtures", "--name", "fig3", "--emit", "trivial"]);
}

#[test]
fn weak_parity_fixture_needs_memory() {
    let dir = TempDir::new().unwrap();
    fig3(&dir);
    let d = dir.path();
    let out = aifm(d, &["solve-mdp", "--arena", "fig3.json", "--skeleton", "mmax.json", "--objective", "weak-parity"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(body(&out)["value"], "3/4");
    let out = aifm(d, &["solve-mdp", "--arena", "fig3.json"]);
    assert_eq!(body(&out)["value"], "1/2");
}

#[test]
fn cover_exit_codes() {
    let dir = TempDir::new().unwrap();
    fig3(&dir);
    let d = dir.path();
    let out = aifm(d, &["cover", "--arena", "fig3.json", "--skeleton", "trivial.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(body(&out)["status"], "ok");
    let out = aifm(d, &["cover", "--arena", "fig3.json", "--skeleton", "mmax.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(body(&out)["status"], "fails");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    fig3(&dir);
    let d = dir.path();
    for args in [
        &["solve-game", "--arena", "fig3.json", "--skeleton", "mmax.json"][..],
        &["product", "--arena", "fig3.json", "--skeleton", "mmax.json"],
        &["generate", "--seed", "7", "--count", "3"],
        &["counterexample", "disc", "--lambda", "1/2", "--skeleton", "trivial.json"],
    ] {
        let (a, b) = (aifm(d, args), aifm(d, args));
        assert_eq!(a.status.code(), b.status.code());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_out_copies_the_body() {
    let dir = TempDir::new().unwrap();
    fig3(&dir);
    let d = dir.path();
    let out = aifm(d, &["--json-out", "split.json", "split", "--arena", "fig3.json", "--state", "s2"]);
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(d.join("split.json")).unwrap()).unwrap();
    assert_eq!(written, body(&out));
}

#[test]
fn outputs_chain_into_inputs() {
    let dir = TempDir::new().unwrap();
    fig3(&dir);
    let d = dir.path();
    save(d, "prod.json", &["product", "--arena", "fig3.json", "--skeleton", "mmax.json"]);
    let out = aifm(d, &["solve-mdp", "--arena", "prod.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(body(&out)["value"], "3/4");
}

#[test]
fn usage_and_input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    fig3(&dir);
    let d = dir.path();
    for args in [
        &["frobnicate"][..],
        &["solve-mdp"],
        &["solve-mdp", "--arena", "missing.json"],
        &["fixtures", "--name", "nope"],
        &["--objective", "disc-expect:1", "solve-mdp", "--arena", "fig3.json"],
        &["--objective", "disc-expect:0.5", "solve-mdp", "--arena", "fig3.json"],
    ] {
        let out = aifm(d, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(body(&out)["status"], "error");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn cap_exceeded_exits_3() {
    let dir = TempDir::new().unwrap();
    fig3(&dir);
    let out = aifm(dir.path(), &["--cap", "1", "solve-mdp", "--arena", "fig3.json", "--skeleton", "mmax.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(body(&out)["status"], "cap-exceeded");
}

#[test]
fn discounted_counterexample_for_the_trivial_skeleton() {
    let dir = TempDir::new().unwrap();
    fig3(&dir);
    let out = aifm(dir.path(), &["counterexample", "disc", "--lambda", "1/2", "--skeleton", "trivial.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = body(&out);
    assert_eq!(v["status"], "ok");
    assert!(v["arena"].is_object());
    assert_eq!((&v["n"], &v["m"]), (&Value::from(0), &Value::from(1)));
    assert_eq!((&v["optimal"], &v["mealy_best"]), (&Value::from("3/4"), &Value::from("1/2")));
}
