//! End-to-end runs of the eqdd binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn eqdd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqdd"))
        .args(args)
        .env_remove("EQDD_SEARCH_BOUND")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("json stdout")
}

fn temp_file(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("eqdd-test-{}-{name}", std::process::id()));
    std::fs::write(&path, content).expect("temp file");
    path
}

#[test]
fn homotopy_limit_example() {
    let out = eqdd(&["homotopy", "-p", "1+t", "-m", "4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "pi_4(Aut) = RBDD0INF\n");
}

#[test]
fn torus_closed_form_example() {
    let out = eqdd(&["torus", "-p", "1+t", "-n", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("Z^10"), "{text}");
    assert!(text.contains("RBDD^10"), "{text}");
    assert!(text.contains("RBDD0INF"), "{text}");
}

#[test]
fn rbdd_residue_certificate() {
    let out = eqdd(&["rbdd", "-p", "1+t^3", "-x", "t/(1+t^3)", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["membership"]["verdict"], "not_in");
    let cert = &v["result"]["membership"]["certificate"];
    assert_eq!(cert["kind"], "residue");
    assert_eq!(cert["modulus"], 3);
    assert_eq!(cert["exponent"], 1);
    assert_eq!(v["p"]["coeffs"], serde_json::json!(["1", "0", "0", "1"]));
    assert_eq!(v["status"], "ok");
}

#[test]
fn membership_yes_with_witness() {
    let out = eqdd(&[
        "rbdd",
        "-p",
        "1+t+t^3+t^4",
        "-x",
        "t^2/(1+t+t^3+t^4)",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["membership"]["verdict"], "in");
    assert_eq!(v["result"]["membership"]["witness_j"], 1);
}

#[test]
fn subring_flag_is_honored() {
    let out = eqdd(&["rbdd", "-p", "1+t", "-x", "1", "--sub", "RBDD0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("in RBDD0: no"), "{text}");
}

#[test]
fn normalization_reports_the_offset() {
    let out = eqdd(&["normalize", "-p", "t^-2+t^-1", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["original_offset"], -2);
    assert_eq!(v["p"]["coeffs"], serde_json::json!(["1", "1"]));
    assert_eq!(v["result"]["endpoint_case"], "D");
}

#[test]
fn domain_errors_exit_one() {
    let out = eqdd(&["normalize", "-p", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error:"));

    let out = eqdd(&["normalize", "-p", "1-t"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("negative coefficient"));
}

#[test]
fn usage_errors_exit_two() {
    let out = eqdd(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));

    let out = eqdd(&["rbdd", "-p", "1+t", "-x", "t", "--sub", "NOPE"]);
    assert_eq!(out.status.code(), Some(2));

    let out = eqdd(&["homotopy", "-p", "1+t", "-m", "3", "--format", "dot"]);
    assert_eq!(out.status.code(), Some(2));

    let out = eqdd(&["pi0", "-p", "1+t", "--search-bound", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = eqdd(&[
        "homotopy",
        "-p",
        "1+t",
        "-m",
        "3",
        "-k",
        "2",
        "--unitary-limit",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_env_and_flag_precedence() {
    let conf = temp_file("prec.conf", "search_bound = 7\ndegree_cap = 24\n");
    let conf = conf.to_str().unwrap();

    let out = eqdd(&[
        "element", "-p", "1+t", "-x", "t", "--config", conf, "--format", "json",
    ]);
    assert_eq!(json(&out)["config"]["search_bound"], 7);
    assert_eq!(json(&out)["config"]["degree_cap"], 24);

    let out = Command::new(env!("CARGO_BIN_EXE_eqdd"))
        .args([
            "element", "-p", "1+t", "-x", "t", "--config", conf, "--format", "json",
        ])
        .env("EQDD_SEARCH_BOUND", "9")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["search_bound"], 9);

    let out = Command::new(env!("CARGO_BIN_EXE_eqdd"))
        .args([
            "element",
            "-p",
            "1+t",
            "-x",
            "t",
            "--search-bound",
            "11",
            "--format",
            "json",
        ])
        .env("EQDD_SEARCH_BOUND", "9")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["search_bound"], 11);

    let bad = temp_file("bad.conf", "fmt = x\n");
    let out = eqdd(&["normalize", "-p", "1", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hypothesis_warning_reaches_both_streams() {
    let out = eqdd(&["pi0", "-p", "1+t^3", "--format", "json"]);
    assert!(out.status.success());
    let err = stderr(&out);
    assert!(err.contains("PAPER_HYPOTHESIS_VIOLATED"), "{err}");
    assert!(err.contains("1-t+t^2"), "{err}");
    let v = json(&out);
    assert_eq!(v["status"], "ok_with_warnings");
    assert!(v["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w["code"] == "PAPER_HYPOTHESIS_VIOLATED"));
}

#[test]
fn bratteli_dot_export() {
    let out = eqdd(&["bratteli", "-p", "1+t", "--levels", "2", "--format", "dot"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("digraph bratteli {"), "{text}");
    assert!(text.contains("\"L1_1\" -> \"L2_2\""), "{text}");
}

#[test]
fn json_output_is_deterministic() {
    let args = ["paper-report", "-p", "1+2t", "-n", "2", "--format", "json"];
    let a = eqdd(&args);
    let b = eqdd(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn output_flag_writes_the_file() {
    let path = std::env::temp_dir().join(format!("eqdd-test-{}-out.json", std::process::id()));
    let out = eqdd(&[
        "coeffs",
        "-p",
        "1+t",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["command"], "coeffs");
    std::fs::remove_file(&path).ok();
}

#[test]
fn trivial_character_matches_the_plain_fibre() {
    let e1 = eqdd(&["torus", "-p", "1", "-n", "3"]);
    assert_eq!(stdout(&e1), "E_1(T^3) = Z^4\n");
    let br = eqdd(&["brauer", "--space", "T^3", "--degree", "1"]);
    assert_eq!(stdout(&br), "H^1 + H^3 over T^3 = Z^4\n");
}

#[test]
fn cw_space_from_a_json_file() {
    let space = temp_file(
        "rp2.json",
        r#"{"name":"RP^2","h":[{"rank":1},{"rank":0},{"rank":0,"torsion":[2]}]}"#,
    );
    let out = eqdd(&[
        "cw",
        "-p",
        "1+t",
        "--space",
        space.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["result"]["e1"].is_null());
    assert!(v["result"]["e1_note"].as_str().unwrap().contains("torsion"));
    let rows = v["result"]["page"]["rows"].as_array().unwrap();
    assert_eq!(rows[1]["q"], -2);
    assert_eq!(rows[1]["cells"][2]["formal"]["Z/2⊗RBDD"], 1);
}

#[test]
fn space_shorthand_forms() {
    assert!(eqdd(&["brauer", "--space", "pt"]).status.success());
    assert!(eqdd(&["brauer", "--space", "S^2"]).status.success());
    let out = eqdd(&["brauer", "--space", "X^9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_verdicts_are_flagged_not_fatal() {
    let out = eqdd(&[
        "rbdd",
        "-p",
        "1+t^2+t^3",
        "-x",
        "t/(1+t^2+t^3)",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["membership"]["verdict"], "unknown");
    assert_eq!(v["status"], "ok_with_warnings");
    assert!(stderr(&out).contains("MEMBERSHIP_UNKNOWN"));
}

#[test]
fn finite_level_report_lists_blocks() {
    let out = eqdd(&[
        "homotopy", "-p", "1+t", "-m", "3", "-k", "5", "--format", "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["group"]["z_rank"], 4);
    assert_eq!(
        v["result"]["verdict"]["summands"].as_array().unwrap().len(),
        6
    );
}
