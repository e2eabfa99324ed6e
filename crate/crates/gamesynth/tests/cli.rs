mod common;

use std::path::Path;
use std::process::Command;

use gamesynth::cli::run;

fn bench(name: &str) -> String {
    common::benchmark_path(name).to_string_lossy().into_owned()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("gamesynth").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn solve_exit_codes_follow_the_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_string_lossy().into_owned();
    let (code, stdout, _) = call(&["solve", &bench("box1d"), "--out-dir", &out]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("solved"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["outcome"], "solved");

    let (code, stdout, _) = call(&["solve", &bench("drift"), "--json"]);
    assert_eq!(code, 2);
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["outcome"], "unrealizable");

    let (code, _, _) = call(&["solve", &bench("box"), "--max-iterations", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn emitted_tree_checks_and_simulates() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("w.tree").to_string_lossy().into_owned();
    let formula = dir.path().join("w.smt2").to_string_lossy().into_owned();
    let (code, _, _) = call(&["solve", &bench("box1d"), "--emit-tree", &tree, "--emit-formula", &formula]);
    assert_eq!(code, 0);
    assert!(dir.path().join("w.dot").exists());
    let (code, stdout, _) = call(&["check", &bench("box1d"), &tree]);
    assert_eq!((code, stdout.as_str()), (0, "Yes\n"));
    let (code, stdout, _) = call(&["check", &bench("box1d"), &formula]);
    assert_eq!((code, stdout.as_str()), (0, "Yes\n"));
    let (code, stdout, _) = call(&["simulate", &bench("box1d"), "--tree", &tree, "--steps", "20", "--seed", "4"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("(0,0) "));
    assert!(stdout.ends_with("SAFE\n"));
}

#[test]
fn check_reports_counterexamples() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "false.txt", "false");
    let (code, stdout, _) = call(&["check", &bench("box1d"), &h]);
    assert_eq!((code, stdout.as_str()), (1, "positive (0,0)\n"));
    let h = write(dir.path(), "bad.tree", "(node (<= q 0) (leaf 1))");
    let (code, _, stderr) = call(&["check", &bench("box1d"), &h]);
    assert_eq!(code, 4);
    assert!(stderr.contains("not a tree or formula"));
}

#[test]
fn oracle_command() {
    let (code, stdout, _) = call(&["oracle", &bench("box1d"), "--box", "x=-5..8,y=0..1"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "vertices: 28\nwinning region: 17\ninit-winning: yes\n");
    let (code, _, stderr) = call(&["oracle", &bench("box1d"), "--box", "x=3..1,y=0..1"]);
    assert_eq!(code, 4);
    assert!(stderr.contains("empty interval"));
    let (code, stdout, _) = call(&["oracle", &bench("drift"), "--box", "x=-3..3"]);
    assert_eq!((code, stdout.ends_with("init-winning: no\n")), (1, true));
}

#[test]
fn scripted_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.txt", "(or (and (= y 0) (>= x 0)) (and (= y 1) (>= x 1)))");
    let script = write(dir.path(), "moves.txt", "(2,0) ; right\n(0,0)\n");
    let adv = format!("script:{script}");
    let (code, stdout, stderr) = call(&["simulate", &bench("box1d"), "--tree", &w, "--steps", "4", "--adversary", &adv]);
    assert_eq!(code, 0, "{stderr}");
    assert_eq!(stdout, "(0,0) (1,1) (2,0) (1,1) (0,0)\nSAFE\n");
    let (code, _, _) = call(&["simulate", &bench("box1d"), "--tree", &w, "--steps", "9", "--adversary", &adv]);
    assert_eq!(code, 3);
    let (code, _, _) = call(&["simulate", &bench("box1d"), "--tree", &w, "--start", "(0,0,0)"]);
    assert_eq!(code, 4);
}

#[test]
fn usage_errors() {
    assert_eq!(call(&["solve", "/nonexistent.game"]).0, 4);
    assert_eq!(call(&["frobnicate"]).0, 4);
    assert_eq!(call(&["solve", &bench("box1d"), "--octagonal", "maybe"]).0, 4);
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "bad.game", "(game (vars (x Int))");
    assert_eq!(call(&["solve", &g]).0, 4);
    let g = write(
        dir.path(),
        "stuck.game",
        "(game (vars (x Int)) (player0 true) (init (= x 0)) (safe true) (edges (and (< x 0) (= x' x))))",
    );
    let (code, _, stderr) = call(&["solve", &g]);
    assert_eq!(code, 4);
    assert!(stderr.contains("no outgoing edge"), "{stderr}");
}

#[test]
fn missing_solver_is_a_resource_error() {
    let (code, _, _) = call(&["solve", &bench("box1d"), "--solver-cmd", "/nonexistent/z3 -in"]);
    assert_eq!(code, 3);
}

#[test]
fn binary_exit_status() {
    let status = Command::new(env!("CARGO_BIN_EXE_gamesynth"))
        .args(["solve", &bench("drift")])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stdout).contains("unrealizable"));
}
