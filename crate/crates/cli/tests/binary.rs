//! Runs the built executable end to end.

use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn horncat(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_horncat"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn solve_prints_verdict_first_and_sets_exit_code() {
    let even = fixture("even.smt2");
    let (code, out) = horncat(&["solve", even.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("sat"));

    let diag = fixture("diag.smt2");
    let (code, out) = horncat(&["solve", diag.to_str().unwrap(), "--max-card", "3", "--refute-height", "4"]);
    assert_eq!(code, 2);
    assert_eq!(out.lines().next(), Some("unknown"));
}

#[test]
fn out_file_receives_model_and_check_model_accepts_it() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("even.model");
    let even = fixture("even.smt2");
    let (code, out) = horncat(&["solve", even.to_str().unwrap(), "--out", model.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out, "sat\n");
    let (code, report) = horncat(&["check-model", even.to_str().unwrap(), model.to_str().unwrap()]);
    assert_eq!(code, 0, "{report}");

    let broken = dir.path().join("broken.model");
    let text = std::fs::read_to_string(&model).unwrap().replace("pred even = {(0)}", "pred even = {(0),(1)}");
    std::fs::write(&broken, text).unwrap();
    let (code, report) = horncat(&["check-model", even.to_str().unwrap(), broken.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(report.contains("violates"), "{report}");
}

#[test]
fn preprocess_emits_a_script_that_solves_the_same() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("pre.smt2");
    let example3 = fixture("example3.smt2");
    let (code, text) = horncat(&["preprocess", example3.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(text.contains("diseq_Nat"));
    std::fs::write(&script, text).unwrap();
    let (code, out) = horncat(&["solve", script.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("unsat"));
}

#[test]
fn unreadable_input_exits_with_one() {
    let (code, _) = horncat(&["solve", "/nonexistent/input.smt2"]);
    assert_eq!(code, 1);
}
