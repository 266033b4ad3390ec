use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_copshield"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("copshield-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn generate(dir: &PathBuf, recipe: &str, file: &str) -> String {
    let path = dir.join(file);
    let o = run(&["generate", "--recipe", recipe, "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    path.to_str().unwrap().to_string()
}

#[test]
fn validate_and_invalid_input() {
    let o = run(&["validate", "--recipe", "named:K4X"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "ok"));
    let dir = scratch("invalid");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"vertices":[1,2],"edges":[{"id":0,"u":1,"v":3}],"crossings":[]}"#).unwrap();
    assert_eq!(code(&run(&["validate", "--graph", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["simulate", "--graph", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["validate", "--recipe", "blob:n=3"])), 2);
    assert_eq!(code(&run(&["validate", "--graph", "/nonexistent.json"])), 2);
}

#[test]
fn planarize_and_detect() {
    let o = run(&["planarize", "--recipe", "named:K4X"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 5);
    assert_eq!(v["xedges"].as_array().unwrap().len(), 8);
    let o = run(&["detect", "--recipe", "named:BARE_X"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    let o = run(&["detect", "--recipe", "named:K4X"]);
    assert_eq!(stdout(&o).trim(), "[]");
}

#[test]
fn simulate_strategy21_captures_and_replays() {
    let dir = scratch("sim");
    let t1 = dir.join("a.jsonl");
    let t2 = dir.join("b.jsonl");
    for t in [&t1, &t2] {
        let o = run(&["simulate", "--recipe", "ghat:n=20:seed=7", "--cops", "strategy21", "--robber", "greedy", "--trace", t.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["outcome"], "capture");
        assert_eq!(v["cop_count"], 21);
    }
    let a = std::fs::read(&t1).unwrap();
    assert_eq!(a, std::fs::read(&t2).unwrap());
    let first: Value = serde_json::from_str(std::str::from_utf8(&a).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(first["kind"], "header");
}

#[test]
fn one_oracle_cop_loses_on_c6() {
    let dir = scratch("c6");
    let c6 = generate(&dir, "cycle:n=6", "c6.json");
    let o = run(&["simulate", "--graph", &c6, "--cops", "oracle", "--cop-count", "1", "--robber", "oracle", "--budget", "300"]);
    assert_eq!(code(&o), 3);
    let o = run(&["simulate", "--graph", &c6, "--cops", "oracle", "--cop-count", "2", "--robber", "oracle"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn too_few_cops_is_invalid() {
    assert_eq!(code(&run(&["simulate", "--recipe", "named:K4X", "--cop-count", "5"])), 2);
}

#[test]
fn interactive_robber_reads_stdin() {
    let mut child = bin()
        .args(["simulate", "--recipe", "path:n=6", "--robber", "interactive"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // place on 6, then stay put every turn
    let mut input = String::from("99\n6\n");
    input.push_str(&"\n".repeat(50));
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("robber> "));
    assert!(err.contains("not a legal vertex: 99"));
    assert!(err.contains("robber at 6"));
}

#[test]
fn solve_examples() {
    let dir = scratch("solve");
    let cache = dir.join("cache");
    let solve = |recipe: &str| {
        let o = bin().args(["solve", "--recipe", recipe]).env("COPSHIELD_CACHE", &cache).output().unwrap();
        (code(&o), stdout(&o).trim().to_string())
    };
    assert_eq!(solve("tree:n=9:seed=3"), (0, "1".into()));
    assert_eq!(solve("cycle:n=6"), (0, "2".into()));
    assert_eq!(solve("named:PETERSEN"), (0, "3".into()));
    assert!(std::fs::read_dir(&cache).unwrap().count() >= 3);
    // cached answers agree
    assert_eq!(solve("named:PETERSEN"), (0, "3".into()));
    assert_eq!(code(&run(&["solve", "--recipe", "grid:w=5:h=5", "--cap", "1000"])), 5);
    assert_eq!(code(&run(&["solve", "--recipe", "named:PETERSEN", "--max-cops", "2"])), 5);
}

#[test]
fn generate_is_deterministic() {
    let a = stdout(&run(&["generate", "--recipe", "xcross:n=12:gamma=2:seed=5"]));
    let b = stdout(&run(&["generate", "--recipe", "xcross:n=12:gamma=2:seed=5"]));
    assert_eq!(a, b);
    let o = run(&["detect", "--recipe", "xcross:n=12:gamma=2:seed=5"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn batch_runs_every_seed() {
    let dir = scratch("batch");
    let o = run(&["batch", "--recipe", "ghat:n=12", "--seeds", "0..6", "--robber", "random", "--trace-dir", dir.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().enumerate().all(|(i, l)| l["seed"] == i as u64 && l["outcome"] == "capture"));
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 6);
    assert_eq!(stdout(&o), stdout(&run(&["batch", "--recipe", "ghat:n=12", "--seeds", "0..6", "--robber", "random"])));
}

fn report(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn suite<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["suites"].as_array().unwrap().iter().find(|s| s["suite"] == name).unwrap()
}

#[test]
fn verify_default_corpus_passes() {
    let o = run(&["verify", "--count", "12"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = report(&o);
    assert_eq!(r["passed"], true);
    for name in ["capture", "invariants", "obs22", "obs23", "obs32", "lemma31"] {
        assert!(suite(&r, name)["checks"].as_u64().unwrap() > 0, "{name}");
    }
}

#[test]
fn verify_catches_kite_removal() {
    let o = run(&["verify", "--count", "8", "--mutate", "remove-kites"]);
    assert_eq!(code(&o), 4);
    let r = report(&o);
    assert_eq!(r["passed"], false);
    assert_eq!(suite(&r, "obs22")["passed"], false);
}

#[test]
fn verify_suite_filter() {
    let dir = scratch("verify");
    let path = dir.join("report.json");
    let o = run(&["verify", "--count", "6", "--suite", "obs32", "--report", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let names: Vec<&str> = r["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(names, vec!["obs32"]);
    // same arguments, same bytes
    let again = dir.join("again.json");
    run(&["verify", "--count", "6", "--suite", "obs32", "--report", again.to_str().unwrap()]);
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}
