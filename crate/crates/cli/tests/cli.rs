use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn x4(args: &[&str], stdin: &str) -> Output {
    x4_env(args, stdin, &[])
}

fn x4_env(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_x4"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    cmd.env_remove("X4_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("x4 runs");
    // the child may exit before reading its input
    let _ = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    child.wait_with_output().unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is a JSON report")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn three_point_graph_gives_weights() {
    let payload = json!({
        "graph": {"vertices": 3, "edges": [{"between": [0, 1], "order": 2}, {"between": [1, 2], "order": 2}]},
        "invariants": ["0", "-1/2", "1/2"],
    });
    let o = x4(&["classify"], &payload.to_string());
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["result"]["kind"], "wcp-quotient");
    assert_eq!(r["result"]["descriptor"]["weights"], json!([4, -1, -1]));
}

#[test]
fn two_loops_are_rejected() {
    let payload = json!({"graph": {"vertices": 2, "edges": [{"loop": 0, "order": 2}, {"loop": 1, "order": 2}]}});
    let o = x4(&["classify"], &payload.to_string());
    assert_eq!(code(&o), 2);
    let r = report(&o);
    assert_eq!(r["status"], "rejected");
    assert_eq!(r["result"]["tag"], "fig5-dg");
    assert!(String::from_utf8_lossy(&o.stderr).contains("fig5-dg"));
}

#[test]
fn canon_ignores_rotation_and_reflection() {
    let a = x4(&["canon"], r#"{"invariants": ["1/2", "0", "-1/2", "1/3"]}"#);
    let b = x4(&["canon"], r#"{"invariants": ["0", "-1/2", "-1/3", "1/2"]}"#);
    assert_eq!(code(&a), 0);
    assert_eq!(report(&a)["result"]["canonical"], report(&b)["result"]["canonical"]);
    let e = x4(&["equiv"], r#"{"a": ["1/2", "0", "-1/2", "1/3"], "b": ["3/2", "1", "1/2", "2/3"]}"#);
    assert_eq!(report(&e)["result"]["equivalent"], true);
}

#[test]
fn unrealizable_triple_is_rejected() {
    let o = x4(&["wcp"], r#"{"invariants": ["0", "0", "1/2"]}"#);
    assert_eq!(code(&o), 2);
    assert_eq!(report(&o)["result"]["tag"], "pairwise-unequal");
}

#[test]
fn higher_genus_is_out_of_range() {
    let o = x4(&["seifert-pi1"], r#"{"genus": 1, "fibers": [[2, 1]]}"#);
    assert_eq!(code(&o), 2);
    assert_eq!(report(&o)["result"]["tag"], "out-of-classified-range");
}

#[test]
fn seifert_commands() {
    let o = x4(&["seifert-pi1"], r#"{"genus": 0, "fibers": [[2, 1], [3, 1], [5, 1]]}"#);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["result"]["first_homology"]["order"], "31");
    let o = x4(&["seifert-recognize"], r#"{"genus": 0, "fibers": [[2, 1], [3, 1]]}"#);
    assert_eq!(report(&o)["result"]["boundary"]["label"], "lens-space");
    assert_eq!(report(&o)["result"]["boundary"]["order"], "5");
    let o = x4(&["euler"], r#"{"genus": 0, "fibers": [[2, 1], [3, 1]]}"#);
    assert_eq!(report(&o)["result"]["euler"], "-5/6");
}

#[test]
fn bad_input_exits_one() {
    for (args, input) in [
        (vec!["canon"], "not json"),
        (vec!["canon"], r#"{"invariants": ["1/2"]}"#),
        (vec!["canon"], r#"{"invariants": ["1/2", "0"], "extra": 1}"#),
        (vec!["wcp"], r#"{"invariants": ["0", "1/2"]}"#),
        (vec!["euler"], r#"{"genus": 0, "fibers": [[2, 4]]}"#),
        (vec!["extent"], r#"{"weights": [1, 1], "samples": 60}"#),
        (vec!["extent"], r#"{"weights": [2, 4], "samples": 60, "seed": 1}"#),
        (vec!["check-q", "--tol", "-1"], r#"{"weights": [1, 1], "samples": 60, "seed": 1}"#),
        (vec!["frobnicate"], "{}"),
    ] {
        let o = x4(&args, input);
        assert_eq!(code(&o), 1, "{args:?} {input}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
    let o = x4_env(&["canon"], r#"{"invariants": ["0", "1"]}"#, &[("X4_THREADS", "zero")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let o = x4(&["extent", "--seed", "5", "--samples", "90"], r#"{"weights": [1, 2], "q": [2, 3, 4]}"#);
    assert_eq!(code(&o), 0);
    let path = dir.path().join("report.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let again = x4(&["run", "--input", path.to_str().unwrap()], "");
    assert_eq!(code(&again), 0);
    assert_eq!(again.stdout, o.stdout);
    let r = report(&o);
    assert_eq!(r["request"]["payload"]["seed"], 5);
    assert_eq!(r["request"]["payload"]["samples"], 90);
}

#[test]
fn thread_count_does_not_change_results() {
    let input = r#"{"weights": [1, 1], "gamma": "cyclic:3", "samples": 150, "seed": 2, "q": [3, 5]}"#;
    let one = x4_env(&["extent"], input, &[("X4_THREADS", "1")]);
    let four = x4_env(&["extent"], input, &[("X4_THREADS", "4")]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn matrix_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.bin");
    let o = x4(&["extent", "--matrix", path.to_str().unwrap()], r#"{"weights": [1, 1], "samples": 60, "seed": 1}"#);
    assert_eq!(code(&o), 0);
    let (n, d) = x4_core::extent_lab::read_matrix(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(n, 60);
    let max = d.iter().cloned().fold(0.0, f64::max);
    assert_eq!(report(&o)["result"]["diameter"].as_f64().unwrap(), max);
}

#[test]
fn unresolved_cover_exits_three() {
    let o = x4(&["check-q"], r#"{"weights": [2, 3], "samples": 50, "seed": 1}"#);
    assert_eq!(code(&o), 3);
    let r = report(&o);
    assert_eq!(r["status"], "not-converged");
    assert_eq!(r["result"]["converged"], false);
}

#[test]
fn hopf_quotient_passes_check_q() {
    let o = x4(&["check-q", "--format", "text"], r#"{"weights": [1, 1], "samples": 80, "seed": 1}"#);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("satisfied: true"));
    assert!(text.contains("tol: 0.02"));
}
