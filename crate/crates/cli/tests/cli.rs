use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const I1: &str = r#"{"num_states":2,"num_actions":2,"horizon":2,"initial_state":0,"time_dependent":false,"transitions":[[[0,1],[1,2]],[[1,1],[0,2]]]}"#;

fn mwdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwdp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_i1(dir: &Path) -> String {
    let path = dir.join("i1.json");
    fs::write(&path, I1).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn bellman_reports_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_i1(dir.path());
    let out = mwdp(&["bellman", "--instance", &path]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("v*(s0) = 4"));
}

#[test]
fn solve_json_reports_action_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_i1(dir.path());
    let out = mwdp(&[
        "solve",
        "--instance",
        &path,
        "--format",
        "json",
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["sigma_bar"], 4);
    assert_eq!(report["action"], 1);
    assert_eq!(report["schema"], "dp-report/1");
}

#[test]
fn malformed_instance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"num_states\": 0}").unwrap();
    let out = mwdp(&["solve", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn qmf_requires_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_i1(dir.path());
    let out = mwdp(&["solve", "--instance", &path, "--strategy", "qmf"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn qmf_solve_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_i1(dir.path());
    let args = [
        "solve",
        "--instance",
        &path,
        "--strategy",
        "qmf",
        "--seed",
        "5",
        "--format",
        "json",
        "--no-timing",
    ];
    let a = mwdp(&args);
    let b = mwdp(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn generated_instance_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let p = path.to_str().unwrap();
    assert!(mwdp(&["gen", "--seed", "9", "--out", p]).status.success());
    let first = fs::read_to_string(&path).unwrap();
    assert!(mwdp(&["gen", "--seed", "9", "--out", p]).status.success());
    assert_eq!(first, fs::read_to_string(&path).unwrap());
    assert!(mwdp(&["bellman", "--instance", p]).status.success());
}

#[test]
fn tsp_bellman_matches_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let p = path.to_str().unwrap();
    assert!(
        mwdp(&["gen", "--kind", "tsp", "--n", "5", "--seed", "2", "--out", p])
            .status
            .success()
    );
    let out = mwdp(&["tsp", "--instance", p, "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["cost"], v["brute_force"]);
}

#[test]
fn bench_is_byte_stable_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.json");
    fs::write(
        &grid,
        r#"{"num_states":[2],"num_actions":[2],"horizon":[2],"reward_max":[2],"seeds":[1,2],"strategies":["exact"]}"#,
    )
    .unwrap();
    let g = grid.to_str().unwrap();
    let a = mwdp(&["bench", "--grid", g, "--no-timing"]);
    let b = mwdp(&["bench", "--grid", g, "--no-timing"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 3);
}

#[test]
fn verify_passes() {
    let out = mwdp(&["verify"]);
    assert!(out.status.success());
    assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn unknown_flag_exits_two() {
    assert_eq!(mwdp(&["solve", "--bogus"]).status.code(), Some(2));
}
