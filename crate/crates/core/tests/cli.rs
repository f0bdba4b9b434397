use std::io::Write;
use std::process::{Command, Output, Stdio};

use nsphere::dual_graph::{GraphOfGroups, TERMINAL_VERTEX_CONDITION};
use nsphere::link_model::Partition;
use nsphere::spine::CollapsePoset;
use serde_json::Value;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nsphere"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn nsphere");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn bar_with_loop() -> GraphOfGroups {
    // rank-1 vertex with a loop, joined to a rank-0 leaf
    GraphOfGroups::from_edge_list(&[1, 0], &[(0, 0), (0, 1)]).unwrap()
}

#[test]
fn link_enum_lists_two_partitions() {
    let out = run(&["link-enum", "--n", "2"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "link-enum");
    let parts: Vec<Partition> = serde_json::from_value(v["result"]["partitions"].clone()).unwrap();
    assert_eq!(parts.len(), 2);
}

#[test]
fn missing_flag_is_usage_error() {
    let out = run(&["link-enum"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--n"));
    assert_eq!(run(&["no-such-command"], None).status.code(), Some(1));
}

#[test]
fn malformed_input_is_exit_one() {
    let out = run(&["classify", "--input", "-"], Some("{\"vertices\": ["));
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["classify", "--input", "-"], Some("{\"vertices\": [], \"edges\": []}"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn terminal_vertex_violates_hypothesis() {
    let out = run(&["realize", "--input", "-"], Some(&bar_with_loop().to_json()));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(TERMINAL_VERTEX_CONDITION));
    assert_eq!(json(&out)["error"]["kind"], "hypothesis-violation");
}

#[test]
fn rose_is_reduced_and_simple() {
    let out = run(&["classify", "--input", "-"], Some(&GraphOfGroups::rose(2).to_json()));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["reduced"], true);
    assert_eq!(v["result"]["simple"], true);
}

#[test]
fn remove_output_feeds_back_in() {
    let theta = GraphOfGroups::from_edge_list(&[0, 0], &[(0, 1), (0, 1), (0, 1)]).unwrap();
    let out = run(&["remove", "--input", "-", "--edge", "e1"], Some(&theta.to_json()));
    assert_eq!(out.status.code(), Some(0));
    let report = String::from_utf8(out.stdout).unwrap();
    let again = run(&["classify", "--input", "-"], Some(&report));
    assert_eq!(again.status.code(), Some(0));
    let v = json(&again);
    assert_eq!(v["result"]["total_rank"], 2);
    assert_eq!(v["result"]["reduced"], true);
}

#[test]
fn poset_round_trips() {
    let out = run(&["spine-poset", "--n", "2"], None);
    let v = json(&out);
    let poset: CollapsePoset = serde_json::from_value(v["result"].clone()).unwrap();
    assert_eq!((poset.nodes.len(), poset.arrows.len()), (2, 1));
}

#[test]
fn tm_family_from_witness_system() {
    let g = GraphOfGroups::from_edge_list(&[1, 0], &[(0, 1), (0, 1)]).unwrap();
    let out = run(&["tm-family", "--max-m", "50", "--input", "-"], Some(&g.to_json()));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["certificates"].as_array().unwrap().len(), 50);
    assert_eq!(v["result"]["report"]["distinct"], true);

    let out = run(&["tm-family", "--max-m", "5", "--input", "-"], Some(&GraphOfGroups::rose(2).to_json()));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["link-complex", "--n", "3"][..],
        &["spine-enum", "--n", "3"],
        &["primitive", "--word", "abAB"],
        &["link-complex", "--n", "3", "--format", "dot"],
    ] {
        assert_eq!(run(args, None).stdout, run(args, None).stdout, "{args:?}");
    }
}

#[test]
fn dot_and_text_formats() {
    let dot = run(&["spine-poset", "--n", "3", "--format", "dot"], None);
    assert!(String::from_utf8_lossy(&dot.stdout).starts_with("digraph"));
    let text = run(&["wh-min", "--word", "abab", "--format", "text"], None);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("cyclic_length: 2"), "{text}");
}
