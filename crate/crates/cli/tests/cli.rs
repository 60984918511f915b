use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn graphcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphcx")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report on stdout is JSON")
}

fn triangle_args<'a>(cmd: &'a str, graph: &'a str, sigma: &'a str, j: &'a str) -> Vec<&'a str> {
    vec![cmd, "--graph", graph, "--sigma", sigma, "--j", j]
}

fn s(p: PathBuf) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn polygon_six_matches_expected_table() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.json");
    let out = graphcx(&["polygon", "--n", "6", "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["golden"]["differences"], serde_json::json!({}));
    assert_eq!(r["golden"]["computed"]["dim_omega1"], 12);
    assert_eq!(r["dimensions"]["omega"], serde_json::json!([6, 12, 6, 0, 0]));
    assert_eq!(r["failures"], serde_json::json!([]));
}

#[test]
fn emitted_inputs_reproduce_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("in");
    let first = graphcx(&["polygon", "--n", "5", "--emit-inputs", inputs.to_str().unwrap()]);
    assert_eq!(code(&first), 0);
    let (g, sg, j) = (s(inputs.join("graph.json")), s(inputs.join("sigma.json")), s(inputs.join("j.json")));
    let second = graphcx(&triangle_args("all", &g, &sg, &j));
    assert_eq!(code(&second), 0, "{}", stderr(&second));
    let mut a = report(&first);
    let b = report(&second);
    a.as_object_mut().unwrap().remove("golden");
    assert_eq!(a, b);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let tri = fixture("triangle");
    let (g, sg, j) = (s(tri.join("graph.json")), s(tri.join("sigma.json")), s(tri.join("j.json")));
    let a = graphcx(&triangle_args("all", &g, &sg, &j));
    let b = graphcx(&triangle_args("all", &g, &sg, &j));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn missing_reverse_edge_is_an_input_error() {
    let tri = fixture("triangle");
    let out = graphcx(&["check", "--graph", &s(fixture("missing_reverse.json")), "--sigma", &s(tri.join("sigma.json"))]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("MissingReverse"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_json_reports_location() {
    let tri = fixture("triangle");
    let out = graphcx(&["check", "--graph", &s(fixture("malformed.json")), "--sigma", &s(tri.join("sigma.json"))]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("ParseError") && err.contains("line 4"), "{err}");
}

#[test]
fn unknown_labels_are_input_errors() {
    let tri = fixture("triangle");
    let g = s(tri.join("graph.json"));
    let out = graphcx(&["check", "--graph", &g, "--sigma", &s(fixture("sigma_unknown_label.json"))]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("UnknownVertex"));
    let out = graphcx(&triangle_args("check", &g, &s(tri.join("sigma.json")), &s(fixture("j_unknown_edge.json"))));
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("UnknownEdge"));
}

#[test]
fn invalid_orientation_is_a_failed_verdict() {
    let tri = fixture("triangle");
    let (g, sg) = (s(tri.join("graph.json")), s(tri.join("sigma.json")));
    let out = graphcx(&triangle_args("all", &g, &sg, &s(fixture("j_both_directions.json"))));
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["checks"]["j_valid"]["status"], "fail");
    assert_eq!(r["holomorphic"]["status"], "skipped");
    assert_eq!(r["cocycles"]["status"], "skipped");
}

#[test]
fn braid_failure_is_reported_with_a_path() {
    let k4 = fixture("k4_braid_failure");
    let out = graphcx(&["prolong", "--graph", &s(k4.join("graph.json")), "--sigma", &s(k4.join("sigma.json"))]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["checks"]["braid"]["status"], "fail");
    assert!(r["checks"]["braid"]["witness"].as_str().unwrap().contains('→'));
    assert_eq!(r["dimensions"]["status"], "skipped");
    assert_eq!(r["failures"], serde_json::json!(["checks.braid"]));
}

#[test]
fn non_permutation_sigma_is_a_failed_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let tri = fixture("triangle");
    let mut sigma: Value = serde_json::from_str(&std::fs::read_to_string(tri.join("sigma.json")).unwrap()).unwrap();
    sigma["1|1"] = serde_json::json!({"2": "2", "3": "2"});
    let path = dir.path().join("sigma.json");
    std::fs::write(&path, sigma.to_string()).unwrap();
    let out = graphcx(&["check", "--graph", &s(tri.join("graph.json")), "--sigma", &s(path)]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["checks"]["sigma_valid"]["status"], "fail");
    assert_eq!(r["checks"]["braid"]["status"], "skipped");
}

#[test]
fn opposite_orientation_loses_positivity() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("in");
    assert_eq!(code(&graphcx(&["polygon", "--n", "4", "--emit-inputs", inputs.to_str().unwrap()])), 0);
    let (g, sg, j) = (s(inputs.join("graph.json")), s(inputs.join("sigma.json")), s(inputs.join("j.json")));
    let mut args = triangle_args("cocycle", &g, &sg, &j);
    args.extend(["--orientation", "opposite"]);
    let out = graphcx(&args);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    let gram = &r["cocycles"]["gram"];
    assert_eq!(gram["is_hermitian"], true);
    assert_eq!(gram["is_psd"], false);
    assert_eq!(gram["witness"]["kind"], "negative_direction");
    assert_eq!(r["failures"], serde_json::json!(["cocycles.gram.is_psd"]));
}

#[test]
fn prolong_without_j_has_no_pq_table() {
    let tri = fixture("triangle");
    let out = graphcx(&["prolong", "--graph", &s(tri.join("graph.json")), "--sigma", &s(tri.join("sigma.json")), "--max-degree", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["dimensions"]["omega"], serde_json::json!([3, 6, 3, 0]));
    assert_eq!(r["dimensions"]["pq"], Value::Null);
    assert!(r.get("cohomology").is_none());
}

#[test]
fn j_dependent_commands_require_j() {
    let tri = fixture("triangle");
    let out = graphcx(&["cohomology", "--graph", &s(tri.join("graph.json")), "--sigma", &s(tri.join("sigma.json"))]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--j"));
}

#[test]
fn matrices_only_on_request() {
    let tri = fixture("triangle");
    let (g, sg, j) = (s(tri.join("graph.json")), s(tri.join("sigma.json")), s(tri.join("j.json")));
    let plain = report(&graphcx(&triangle_args("holo", &g, &sg, &j)));
    assert!(plain.get("matrices").is_none());
    let mut args = triangle_args("holo", &g, &sg, &j);
    args.push("--emit-matrices");
    let full = report(&graphcx(&args));
    let m = &full["matrices"];
    assert_eq!(m["sigma"]["rows"], 12);
    assert!(m.get("nabla_bar").is_some() && m.get("delbar_0").is_some());
    assert_eq!(full["holomorphic"]["sections"]["one_forms"], 2);
}

#[test]
fn degenerate_polygon_is_rejected() {
    let out = graphcx(&["polygon", "--n", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("at least 3"));
}
