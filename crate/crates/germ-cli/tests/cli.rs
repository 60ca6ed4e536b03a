//! End-to-end tests of the `germ` binary: JSON in, JSON out, and the
//! three-way exit-code contract (0 verdict-true, 1 failed mathematical
//! check, 2 malformed input).

use std::io::Write as _;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn germ() -> Command {
    Command::new(env!("CARGO_BIN_EXE_germ"))
}

/// Run with the given arguments and standard input, capturing everything.
fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = germ()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .expect("stdin piped")
        .write_all(stdin.as_bytes())
        .expect("payload written");
    child.wait_with_output().expect("binary exits")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON report")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

const TWO_LINES: &str = r#"{"f":{"prec":null,"terms":[[0,2,"[1]"],[1,1,"[3]"],[2,0,"[2]"]]},"lambda":[1,1]}"#;

#[test]
fn dims_reproduces_the_closed_form_instance() {
    let out = run(&["dims", "--g", "2", "--n", "2"], "");
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["loc"], 12);
    assert_eq!(r["b"], 7);
    assert_eq!(r["pic"], 5);
    assert_eq!(r["identity"], true);
}

#[test]
fn dims_genus_cross_check_with_partition() {
    let out = run(&["dims", "--g", "2", "--n", "3", "--lambda", "2,1", "--p", "5"], "");
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["genus_cross_check"]["consistent"], true);
    assert_eq!(r["genus_cross_check"]["delta"], 1);
    assert_eq!(r["genus_cross_check"]["arithmetic_genus"], 13);
    assert_eq!(r["genus_cross_check"]["geometric_genus"], 12);
}

#[test]
fn dims_rejects_low_genus_as_input_error() {
    let out = run(&["dims", "--g", "1", "--n", "2"], "");
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty(), "no partial report on failure");
    assert!(!out.stderr.is_empty(), "diagnostic goes to standard error");
}

#[test]
fn factor_splits_two_transverse_lines() {
    let out = run(&["factor", "--p", "5"], TWO_LINES);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["multiply_back"], true);
    let branches = r["branches"].as_array().expect("branch list");
    assert_eq!(branches.len(), 2);
    let consts: Vec<&str> = branches
        .iter()
        .map(|b| b["constant"].as_str().expect("constant string"))
        .collect();
    assert_eq!(consts, vec!["[1]", "[2]"]);
}

#[test]
fn factor_flags_repeated_roots_as_math_failure() {
    // (y + x)^2 has a double residue root, so simple-root lifting fails.
    let square = r#"{"f":{"prec":null,"terms":[[0,2,"[1]"],[1,1,"[2]"],[2,0,"[1]"]]},"lambda":[1,1]}"#;
    let out = run(&["factor", "--p", "5"], square);
    assert_eq!(code(&out), 1);
    assert!(out.stdout.is_empty());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("repeated root"), "stderr was: {err}");
}

#[test]
fn factor_rejects_malformed_json_without_output() {
    let out = run(&["factor", "--p", "5"], "{ not json");
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn factor_reads_payload_from_a_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("germ.json");
    std::fs::write(&path, TWO_LINES).expect("payload written");
    let out = run(&["factor", "--p", "5", "--input", path.to_str().unwrap()], "");
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["multiply_back"], true);
}

#[test]
fn bp0check_reports_the_three_conditions() {
    let payload = r#"{"f":[{"val":2,"prec":null,"coeffs":["[2]"]},{"val":1,"prec":null,"coeffs":["[3]"]},{"val":0,"prec":null,"coeffs":["[1]"]}],"lambda":[1,1]}"#;
    let out = run(&["bp0check", "--p", "5"], payload);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["in_P_lambda0"], true);
    assert_eq!(r["distinct_constants"], true);
    assert_eq!(r["smooth_away_from_q"], true);
    assert_eq!(r["branches"].as_array().unwrap().len(), 2);
}

#[test]
fn bp0check_false_verdict_still_prints_a_report() {
    // Equal branch constants: (y + x)(y + x) fails distinctness, and the
    // germ is not even in the open class; the report says so with exit 1.
    let payload = r#"{"f":[{"val":2,"prec":null,"coeffs":["[1]"]},{"val":1,"prec":null,"coeffs":["[2]"]},{"val":0,"prec":null,"coeffs":["[1]"]}],"lambda":[1,1]}"#;
    let out = run(&["bp0check", "--p", "5"], payload);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["verdict"], false);
}

#[test]
fn normalize_separates_two_lines_in_one_step() {
    let out = run(&["normalize", "--p", "5", "--g", "2"], TWO_LINES);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["steps_used"], 1);
    assert_eq!(r["branch_count"], 2);
    assert_eq!(r["delta"], 1);
    assert_eq!(r["expected_delta"], 1);
    assert_eq!(r["arithmetic_genus"], 6);
    assert_eq!(r["geometric_genus"], 5);
    let points: Vec<Option<&str>> = r["branch_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["point"].as_str())
        .collect();
    assert_eq!(points.len(), 2);
    assert_ne!(points[0], points[1], "branch points must separate");
}

#[test]
fn normalize_uses_zero_steps_on_a_smooth_germ() {
    // y^2 + x is already smooth at the origin.
    let payload = r#"{"f":{"prec":null,"terms":[[0,2,"[1]"],[1,0,"[1]"]]},"lambda":[2]}"#;
    let out = run(&["normalize", "--p", "5"], payload);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["steps_used"], 0);
    assert_eq!(r["delta"], 0);
}

#[test]
fn pcurv_constant_connection_has_zero_curvature() {
    let payload = r#"{"p":5,"m":1,"rank":1,"A":[[{"val":0,"prec":12,"coeffs":["[3]"]}]]}"#;
    let out = run(&["pcurv"], payload);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["residue_identity"], true);
    assert_eq!(r["descends"], true);
    assert_eq!(r["residue"][0][0], "[0]");
}

#[test]
fn pcurv_rank_mismatch_is_a_schema_error() {
    let payload = r#"{"p":5,"rank":2,"A":[[{"val":0,"prec":12,"coeffs":["[3]"]}]]}"#;
    let out = run(&["pcurv"], payload);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn residue_lemma_flags_the_nilpotent_case() {
    // A(0) strictly upper triangular: res(psi) must also equal -A(0).
    let payload = r#"{"p":5,"A":[
        [{"val":null,"prec":12,"coeffs":[]},{"val":0,"prec":12,"coeffs":["[1]"]}],
        [{"val":null,"prec":12,"coeffs":[]},{"val":null,"prec":12,"coeffs":[]}]]}"#;
    let out = run(&["residue-lemma"], payload);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["holds"], true);
    assert_eq!(r["nilpotent_case"], true);
}

#[test]
fn cartier_descends_a_flat_connection_and_rejects_residue() {
    let flat = r#"{"p":5,"A":[[{"val":null,"prec":12,"coeffs":[]}]]}"#;
    let out = run(&["cartier"], flat);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["flat"], true);

    let charged = r#"{"p":5,"A":[[{"val":0,"prec":12,"coeffs":["[3]"]}]]}"#;
    let out = run(&["cartier"], charged);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("residue"), "stderr was: {err}");
}

#[test]
fn cartier_reports_the_obstruction_degree() {
    // x d/dx + x has zero residue but nonzero p-curvature x^p; descent
    // must fail at exactly that degree.
    let payload = r#"{"p":5,"A":[[{"val":1,"prec":12,"coeffs":["[1]"]}]]}"#;
    let out = run(&["cartier"], payload);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("degree 5"), "stderr was: {err}");
}

#[test]
fn asolve_solves_and_verifies_the_ode() {
    let payload = r#"{"p":5,"h":{"prec":30,"terms":[[5,0,"[1]"]]}}"#;
    let out = run(&["asolve"], payload);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["residual_zero"], true);
}

#[test]
fn asolve_rejects_non_descending_data() {
    // Lowest x-order 1 is not divisible by p, so no solution exists.
    let payload = r#"{"p":5,"h":{"prec":20,"terms":[[1,0,"[1]"]]}}"#;
    let out = run(&["asolve"], payload);
    assert_eq!(code(&out), 1);
    assert!(out.stdout.is_empty());
}

#[test]
fn build_conn_verifies_the_prescribed_curvature() {
    let payload = r#"{"p":5,"lambda":2,"w":[{"val":0,"prec":40,"coeffs":["[1]"]}],"a":"[1]"}"#;
    let out = run(&["build-conn"], payload);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["psi_is_multiplication_by_y"], true);
    // a = 1 over F_5 forces an Artin-Schreier extension for sigma.
    assert_eq!(r["extension_degree"], 5);
    assert_eq!(r["eigenvalue"], "[1,0,0,0,0]");
}

#[test]
fn selftest_single_check_is_deterministic() {
    // Wall-clock fields vary run to run; the mathematical content of the
    // report must not.
    fn strip_timing(mut r: Value) -> Value {
        r.as_object_mut().unwrap().remove("total_millis");
        for c in r["checks"].as_array_mut().unwrap() {
            c.as_object_mut().unwrap().remove("millis");
        }
        r
    }
    let a = run(&["selftest", "--only", "10", "--seed", "7"], "");
    let b = run(&["selftest", "--only", "10", "--seed", "7"], "");
    assert_eq!(code(&a), 0);
    let (ra, rb) = (strip_timing(report(&a)), strip_timing(report(&b)));
    assert_eq!(ra, rb, "fixed seed must reproduce the report");
    assert_eq!(ra["all_passed"], true);
    assert_eq!(ra["checks"][0]["name"], "artin-schreier-section");
}

#[test]
fn selftest_fast_checks_pass() {
    for id in ["1", "2", "5", "9"] {
        let out = run(&["selftest", "--only", id, "--seed", "42"], "");
        assert_eq!(code(&out), 0, "check {id} failed");
        assert_eq!(report(&out)["all_passed"], true);
    }
}

#[test]
fn unknown_subcommands_are_rejected_up_front() {
    let out = run(&["frobnicate"], "");
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}
