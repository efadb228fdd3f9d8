use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const LONG_TAIL: &str = "({3,6},{2},{1,5},{4,7})";
const SMOOTH_1_1: &str = r#"{"g":1,"n":1,"vertices":[{"id":"a","genus":1}],"edges":[],"legs":{"1":"a"}}"#;
const MARKED_ELLIPTIC: &str = r#"{"g":3,"n":2,"vertices":[{"id":"a","genus":1},{"id":"b","genus":1},
    {"id":"c","genus":1}],"edges":[["a","b"],["b","c"]],"legs":{"1":"a","2":"c"}}"#;
const TAIL_1_3: &str = r#"{"g":1,"n":3,"vertices":[{"id":"a","genus":1},{"id":"b","genus":0}],
    "edges":[["a","b"]],"legs":{"1":"b","2":"b","3":"b"}}"#;

fn strata(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn certify_long_tail_from_partition() {
    let out = strata(&["certify", "--partition", LONG_TAIL, "--genus", "2"], "");
    assert_eq!(out.status.code(), Some(0));
    let cert = json(&out);
    assert_eq!(cert["schema_version"], 1);
    assert_eq!(cert["verdict"], "CERTIFIED");
    assert_eq!(cert["rule"], "HASSETT_CONTRACTION");
    assert_eq!(cert["citation"], "hassett-reduction-exceptional-locus");
    assert_eq!(cert["pseudoeffective"], true);
    assert_eq!(cert["witnesses"]["tail"], serde_json::json!([1, 2, 4, 5, 7]));

    let checked = strata(&["--quiet", "check"], &stdout(&out));
    assert_eq!(checked.status.code(), Some(0));
    assert_eq!(json(&checked)["ok"], true);
    assert!(checked.stderr.is_empty());
}

#[test]
fn certify_and_enumerate_are_byte_identical() {
    let args = ["certify", "--partition", LONG_TAIL, "--genus", "2"];
    assert_eq!(strata(&args, "").stdout, strata(&args, "").stdout);
    let args = ["--jobs", "4", "enumerate", "-g", "1", "-n", "3"];
    let first = strata(&args, "");
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, strata(&["enumerate", "-g", "1", "-n", "3"], "").stdout);
}

#[test]
fn enumerate_counts_layers() {
    let out = strata(&["enumerate", "--genus", "0", "--marks", "5", "--max-codim", "2", "--count"], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "10 15");
}

#[test]
fn dim_of_smooth_genus_one() {
    let out = strata(&["dim"], SMOOTH_1_1);
    assert_eq!(stdout(&out).trim(), "1");
}

#[test]
fn exit_codes_follow_the_verdict() {
    let out = strata(&["certify"], MARKED_ELLIPTIC);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["witnesses"]["blocker"], "limit:marked-elliptic-tail");
    assert_eq!(strata(&["certify"], SMOOTH_1_1).status.code(), Some(3));
    assert_eq!(strata(&["certify"], TAIL_1_3).status.code(), Some(0));
}

#[test]
fn parse_errors_are_positioned() {
    let out = strata(&["dim"], r#"{"g":1,"n":1,"#);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1 column"), "{err}");

    let out = strata(&["certify", "--partition", "({1},{2 3})", "--genus", "1"], "");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("offset 8"), "{err}");
}

#[test]
fn invalid_graph_is_a_fault() {
    let unstable = r#"{"g":0,"n":2,"vertices":[{"id":"a","genus":0}],"edges":[],"legs":{"1":"a","2":"a"}}"#;
    assert_eq!(strata(&["validate"], unstable).status.code(), Some(1));
    let out = strata(&["validate"], TAIL_1_3);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["valid"], true);
}

#[test]
fn morphism_images() {
    let out = strata(&["forget", "--mark", "1"], TAIL_1_3);
    assert_eq!(out.status.code(), Some(0));
    let image = json(&out);
    assert_eq!(image["schema_version"], 1);
    assert_eq!(image["index"], 1);

    let out = strata(&["reduce", "--light-tail", "1,2,3"], TAIL_1_3);
    let image = json(&out);
    assert_eq!(image["index"], 1);
    assert_eq!(image["in_exceptional_locus"], true);

    let out = strata(&["reduce", "--weight-list", "1,1,1"], TAIL_1_3);
    assert_eq!(json(&out)["index"], 0);

    let out = strata(&["reduce", "--weight-list", "1,0.5,1"], TAIL_1_3);
    assert_eq!(out.status.code(), Some(1));

    let elliptic = r#"{"g":2,"n":1,"vertices":[{"id":"a","genus":1},{"id":"b","genus":1}],
        "edges":[["a","b"]],"legs":{"1":"a"}}"#;
    let out = strata(&["contract-eps"], elliptic);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["index"], 1);
}

#[test]
fn degenerate_and_classify() {
    let out = strata(&["degenerate", "-k", "1"], SMOOTH_1_1);
    assert_eq!(json(&out)["degenerations"].as_array().unwrap().len(), 1);
    let out = strata(&["classify"], TAIL_1_3);
    let class = json(&out);
    assert_eq!(class["rational_tails"], true);
    assert_eq!(class["tails"], serde_json::json!([[1, 2, 3]]));
}

#[test]
fn tampered_certificate_fails_check() {
    let out = strata(&["certify", "--partition", LONG_TAIL, "--genus", "2"], "");
    let mut cert = json(&out);
    cert["witnesses"]["weights"] = serde_json::json!(["1", "1", "1", "1", "1", "1", "1"]);
    let checked = strata(&["check"], &cert.to_string());
    assert_eq!(checked.status.code(), Some(1));
    let report = json(&checked);
    assert_eq!(report["ok"], false);
    assert_eq!(report["failure"]["reason"], "index not positive");
}

#[test]
fn export_and_oracle() {
    let dot = strata(&["export", "-g", "0", "-n", "5", "--dot"], "");
    assert!(stdout(&dot).starts_with("digraph"));
    let exported = strata(&["export", "-g", "0", "-n", "5", "--json"], "");
    assert_eq!(json(&exported)["layers"], serde_json::json!([1, 10, 15]));

    let out = strata(&["oracle", "-g", "0", "-n", "5", "--json"], "");
    assert_eq!(out.status.code(), Some(0));
    let reports = json(&out);
    assert_eq!(reports.as_array().unwrap().len(), 4);
    assert!(reports.as_array().unwrap().iter().all(|r| r["verdict"] == "pass"));
    let out = strata(&["oracle", "-g", "0", "-n", "5", "--claim", "nonsense"], "");
    assert_eq!(out.status.code(), Some(1));
}
