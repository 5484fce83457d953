//! End-to-end tests of the command-line interface: subcommand behavior,
//! exit codes, record schema, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expander-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn gen(dir: &Path, name: &str, family_args: &[&str]) -> String {
    let path = dir.join(name);
    let path_str = path.to_str().expect("utf-8 path").to_owned();
    let mut args = vec!["gen"];
    args.extend_from_slice(family_args);
    args.extend_from_slice(&["--out", &path_str]);
    let output = run(&args);
    assert!(output.status.success(), "gen failed: {}", stderr(&output));
    path_str
}

#[test]
fn gen_is_deterministic_and_reports_structure() {
    let dir = tempfile::tempdir().unwrap();
    let first = gen(dir.path(), "a.edges", &["random-regular", "n=8", "d=3", "--seed", "1"]);
    let second = gen(dir.path(), "b.edges", &["random-regular", "n=8", "d=3", "--seed", "1"]);
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap(),
        "same spec and seed must produce byte-identical files"
    );
    let output = run(&["gen", "dumbbell", "n_half=8", "d=8", "--out", first.as_str()]);
    let text = stdout(&output);
    assert!(text.contains("n=16"), "{text}");
    assert!(text.contains("side conductance = 0.015625"), "{text}");
    let header = std::fs::read_to_string(&first).unwrap();
    assert!(header.starts_with("16 71 8\n"), "{header}");
}

#[test]
fn gen_rejects_infeasible_and_malformed_specs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.edges");
    let out = out.to_str().unwrap();
    let odd = run(&["gen", "random-regular", "n=7", "d=3", "--out", out]);
    assert_eq!(odd.status.code(), Some(2), "{}", stderr(&odd));
    assert!(stderr(&odd).contains("odd"), "{}", stderr(&odd));
    let unknown = run(&["gen", "moebius", "n=8", "--out", out]);
    assert_eq!(unknown.status.code(), Some(2));
    let missing = run(&["gen", "random-regular", "n=8", "--out", out]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("d=<number>"), "{}", stderr(&missing));
    let stray = run(&["gen", "cycle", "n=8", "d=3", "--out", out]);
    assert_eq!(stray.status.code(), Some(2));
}

/// Strips the one field that legitimately varies between reruns.
fn canonical_records(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|line| {
            let mut record: Value = serde_json::from_str(line).expect("valid record");
            let object = record.as_object_mut().expect("record object");
            assert_eq!(object["schema_version"], 1);
            object.remove("wall_ms").expect("wall_ms present");
            record
        })
        .collect()
}

#[test]
fn test_records_are_reproducible_modulo_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let graph = gen(dir.path(), "g.edges", &["random-regular", "n=64", "d=4", "--seed", "5"]);
    let record_args = |out: &str, threads: &str| {
        vec![
            "test", "--graph", &graph, "--tester", "seeded-qff", "--trials", "6", "--seed",
            "11", "--out", out, "--threads", threads,
        ]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
    };
    let first = dir.path().join("first.jsonl");
    let second = dir.path().join("second.jsonl");
    for (path, threads) in [(&first, "1"), (&second, "2")] {
        let args: Vec<String> = record_args(path.to_str().unwrap(), threads);
        let refs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let output = run(&refs);
        assert!(output.status.success(), "{}", stderr(&output));
        assert!(stdout(&output).contains("accept"), "{}", stdout(&output));
    }
    let a = canonical_records(&first);
    let b = canonical_records(&second);
    assert_eq!(a.len(), 6);
    assert_eq!(a, b, "records must not depend on the thread count");
    for (idx, record) in a.iter().enumerate() {
        assert_eq!(record["trial"], idx as u64, "ordered flush by trial index");
        assert_eq!(record["config"]["resolved"]["iterations"], 40);
    }
}

#[test]
fn overrides_reach_the_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let graph = gen(dir.path(), "g.edges", &["complete", "n=8"]);
    let out = dir.path().join("r.jsonl");
    let output = run(&[
        "test",
        "--graph",
        &graph,
        "--tester",
        "qff",
        "--phi",
        "1.0",
        "--trials",
        "1",
        "--override",
        "K=3",
        "--override",
        "t=12",
        "--override",
        "backend=exact",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("accept 1/1"), "{}", stdout(&output));
    let records = canonical_records(&out);
    let resolved = &records[0]["config"]["resolved"];
    assert_eq!(resolved["iterations"], 3);
    assert_eq!(resolved["walk_len"], 12);
    assert_eq!(resolved["backend"], "exact");
    let rerun = run(&[
        "test",
        "--graph",
        &graph,
        "--tester",
        "qff",
        "--phi",
        "1.0",
        "--trials",
        "1",
        "--override",
        "K=3",
        "--override",
        "t=12",
        "--override",
        "backend=exact",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(rerun.status.success());
    assert_eq!(records, canonical_records(&out), "exact backend is deterministic");
}

#[test]
fn usage_and_io_failures_use_distinct_exit_codes() {
    let bad_tester = run(&["test", "--graph", "/tmp/x", "--tester", "warp"]);
    assert_eq!(bad_tester.status.code(), Some(2));
    let missing_graph = run(&["test", "--graph", "/nonexistent/g.edges", "--tester", "qff"]);
    assert_eq!(missing_graph.status.code(), Some(3), "{}", stderr(&missing_graph));
    let bad_override = run(&[
        "test",
        "--graph",
        "/nonexistent/g.edges",
        "--tester",
        "qff",
        "--override",
        "warp=9",
    ]);
    assert_eq!(bad_override.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let graph = gen(dir.path(), "g.edges", &["cycle", "n=8"]);
    let truncated = std::fs::read_to_string(&graph).unwrap();
    let clipped: String = truncated.lines().take(3).collect::<Vec<_>>().join("\n");
    let corrupt = dir.path().join("corrupt.edges");
    std::fs::write(&corrupt, clipped).unwrap();
    let malformed = run(&[
        "test",
        "--graph",
        corrupt.to_str().unwrap(),
        "--tester",
        "qff",
    ]);
    assert_eq!(malformed.status.code(), Some(3), "{}", stderr(&malformed));
}

#[test]
fn verify_reports_margins_and_exit_codes() {
    let passing = run(&["verify", "eq3", "--seed", "7"]);
    assert_eq!(passing.status.code(), Some(0));
    let text = stdout(&passing);
    assert!(text.contains("PASS"), "{text}");
    assert!(text.contains("margin"), "{text}");
    assert!(text.contains("0 failed"), "{text}");
    let unknown = run(&["verify", "warp-core"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn scaling_fits_slopes_on_a_short_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let output = run(&[
        "scaling",
        "--tester",
        "qff",
        "--sizes",
        "64,128,256,512",
        "--trials",
        "2",
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("total slope"), "{text}");
    assert!(text.contains("control slope +0.000"), "{text}");
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["points"].as_array().unwrap().len(), 4);
    assert!(report["total_slope"].as_f64().unwrap() > 0.0);
    let short = run(&["scaling", "--tester", "qff", "--sizes", "64,128"]);
    assert_eq!(short.status.code(), Some(2));
}
