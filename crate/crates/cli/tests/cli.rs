use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn indiqp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indiqp")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = indiqp(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn read_json(p: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn gen_then_solve_path() {
    let dir = tempfile::tempdir().unwrap();
    let t = path(dir.path(), "t.json");
    let s = path(dir.path(), "s.json");
    ok(&["gen", "tridiag", "--n", "100", "--seed", "1", "-o", &t]);
    let out = ok(&["solve-path", &t, "-o", &s]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("objective"));
    let sol = read_json(&s);
    assert_eq!(sol["x"].as_array().unwrap().len(), 100);
    assert!(sol["z"].as_array().unwrap().iter().all(|v| v == 0 || v == 1));
    assert!(sol["objective"].as_f64().unwrap().is_finite());
    assert!(sol.get("gap").is_none());
}

#[test]
fn small_path_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let t = path(dir.path(), "t.json");
    ok(&["gen", "tridiag", "--n", "12", "--seed", "3", "-o", &t]);
    let a: Value = serde_json::from_slice(&ok(&["solve-path", &t]).stdout).unwrap();
    let b: Value = serde_json::from_slice(&ok(&["oracle", &t]).stdout).unwrap();
    let (a, b) = (a["objective"].as_f64().unwrap(), b["objective"].as_f64().unwrap());
    assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{a} vs {b}");
}

#[test]
fn path_and_decomp_agree_on_path_instance() {
    let dir = tempfile::tempdir().unwrap();
    let t = path(dir.path(), "sig.json");
    ok(&["gen", "signal1d", "--n", "60", "--sigma", "0.1", "--mu", "0.01", "--seed", "4", "-o", &t]);
    let p: Value = serde_json::from_slice(&ok(&["solve-path", &t]).stdout).unwrap();
    let d: Value = serde_json::from_slice(&ok(&["solve-decomp", &t]).stdout).unwrap();
    let (p, d) = (p["objective"].as_f64().unwrap(), d["objective"].as_f64().unwrap());
    assert!((p - d).abs() <= 1e-9 * p.abs().max(1.0), "{p} vs {d}");
}

#[test]
fn decomp_on_lattice_writes_log() {
    let dir = tempfile::tempdir().unwrap();
    let l = path(dir.path(), "l.json");
    let log = path(dir.path(), "log.csv");
    let s = path(dir.path(), "s.json");
    ok(&["gen", "lattice2d", "--rows", "6", "--cols", "6", "--sigma", "0.3", "--mu", "0.1", "--seed", "2", "-o", &l]);
    ok(&[
        "solve-decomp", &l, "--steps", "harmonic", "--eps", "0.01", "--max-iter", "300", "--log", &log, "-o", &s,
    ]);
    let csv = std::fs::read_to_string(&log).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,lower,upper,gap,step,elapsed_ms"));
    let sol = read_json(&s);
    assert_eq!(lines.count() as u64, sol["iters"].as_u64().unwrap());
    let (lo, up) = (sol["lower"].as_f64().unwrap(), sol["upper"].as_f64().unwrap());
    assert!(lo <= up + 1e-9);
    assert_eq!(sol["objective"].as_f64().unwrap(), up);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut artifacts = Vec::new();
    for run in 0..2 {
        let l = path(dir.path(), &format!("l{run}.json"));
        let s = path(dir.path(), &format!("s{run}.json"));
        let o = path(dir.path(), &format!("o{run}.json"));
        ok(&["gen", "lattice2d", "--rows", "5", "--cols", "5", "--seed", "9", "-o", &l]);
        ok(&["solve-decomp", &l, "--max-iter", "50", "-o", &s]);
        ok(&["decompose", &l, "-o", &o]);
        artifacts.push([l, s, o].map(|p| std::fs::read(p).unwrap()));
    }
    assert_eq!(artifacts[0], artifacts[1]);
}

#[test]
fn threads_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let l = path(dir.path(), "l.json");
    ok(&["gen", "lattice2d", "--rows", "6", "--cols", "5", "--seed", "5", "-o", &l]);
    let one = ok(&["solve-decomp", &l, "--max-iter", "40"]).stdout;
    let four = ok(&["solve-decomp", &l, "--max-iter", "40", "--threads", "4"]).stdout;
    assert_eq!(one, four);
}

#[test]
fn decompose_lists_every_edge_once() {
    let dir = tempfile::tempdir().unwrap();
    let l = path(dir.path(), "l.json");
    ok(&["gen", "lattice2d", "--rows", "4", "--cols", "4", "-o", &l]);
    let d: Value = serde_json::from_slice(&ok(&["decompose", &l]).stdout).unwrap();
    let mut ordering: Vec<u64> = d["ordering"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    ordering.sort();
    assert_eq!(ordering, (1..=16).collect::<Vec<_>>());
    let edges = d["retained"].as_array().unwrap().len() + d["relaxed"].as_array().unwrap().len();
    assert_eq!(edges, 24);
}

#[test]
fn bench_emits_csv() {
    let out = ok(&["bench", "--family", "tridiag", "--sizes", "50,100", "--reps", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,n,reps,median_ms,objective");
    assert!(lines[1].starts_with("tridiag,50,3,"));
    assert!(lines[2].starts_with("tridiag,100,3,"));
}

#[test]
fn input_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");
    std::fs::write(&bad, "{\"n\": 2, \"a\": [1]}").unwrap();
    assert_eq!(indiqp(&["solve-path", &bad]).status.code(), Some(2));
    assert_eq!(indiqp(&["solve-path", &path(dir.path(), "missing.json")]).status.code(), Some(2));
    let l = path(dir.path(), "l.json");
    ok(&["gen", "lattice2d", "--rows", "3", "--cols", "3", "-o", &l]);
    assert_eq!(indiqp(&["solve-path", &l]).status.code(), Some(2));
    assert_eq!(indiqp(&["solve-decomp", &l, "--eps", "0"]).status.code(), Some(2));
    assert_eq!(indiqp(&["gen", "nope"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let t = path(dir.path(), "indef.json");
    std::fs::write(&t, r#"{"n":2,"a":[1,1],"c":[-1,-1],"Q":[[1,1,1],[1,2,3],[2,2,1]]}"#).unwrap();
    assert_eq!(indiqp(&["solve-path", &t]).status.code(), Some(3));
}
