use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hornclaw"))
        .args(args)
        .current_dir(root())
        .env_remove("HORNCLAW_EXTERNAL_SOLVER")
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(run(args).stdout).unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--bogus"]), 3);
    assert_eq!(code(&["solve"]), 3);
    assert_eq!(code(&["solve", "examples/programs/missing.hof"]), 3);
    assert_eq!(code(&["transform", "--steps", "frobnicate", "examples/programs/example2.hof"]), 3);
}

#[test]
fn solve_exit_codes() {
    assert_eq!(code(&["solve", "examples/programs/example1.hof"]), 0);
    assert_eq!(code(&["solve", "examples/programs/mccarthy_bug.hof"]), 1);
    assert_eq!(code(&["solve", "examples/programs/sum.hof"]), 2);
    assert_eq!(code(&["solve", "--external", "/nonexistent", "examples/programs/mccarthy.hof"]), 2);
}

#[test]
fn check_model_exit_codes() {
    assert_eq!(code(&["check-model", "--model", "examples/models/mc_invariant.model", "examples/smt/mccarthy.smt2"]), 0);
    assert_eq!(code(&["check-model", "--model", "examples/models/mc_trivial.model", "examples/smt/mccarthy.smt2"]), 1);
}

#[test]
fn encode_emits_parseable_smtlib() {
    let text = stdout(&["encode", "examples/programs/mccarthy.hof"]);
    assert!(text.contains("(set-logic HORN)"));
    hornclaw::io::parse_smtlib(&text).unwrap();
    let canon = stdout(&["encode", "--canonical", "examples/programs/mccarthy.hof"]);
    // The canonical form keeps the success flag as a Bool argument.
    assert!(canon.contains("Bool) Bool)"), "{canon}");
    assert!(!text.contains("Bool) Bool)"), "{text}");
}

#[test]
fn transform_pipeline_reaches_three_clauses() {
    let text = stdout(&[
        "transform",
        "--steps",
        "merge:app1:Ev_clo2,tautologies,resolve:succ",
        "examples/programs/example2.hof",
    ]);
    let s = hornclaw::io::parse_smtlib(&text).unwrap();
    assert_eq!(s.clauses.len(), 3);
}

#[test]
fn parse_lists_declarations() {
    let out = stdout(&["parse", "examples/programs/mccarthy.hof"]);
    assert!(out.contains("mc"), "{out}");
}

#[test]
fn json_reports_parse() {
    for (file, verdict) in [("examples/programs/example1.hof", "sat"), ("examples/programs/mccarthy_bug.hof", "unsat")]
    {
        let out = stdout(&["solve", "--json", file]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdict"], verdict);
        assert_eq!(v["certified"], true);
        assert!(v["certificate"].is_object());
    }
    let out =
        stdout(&["check-model", "--json", "--model", "examples/models/mc_invariant.model", "examples/smt/mccarthy.smt2"]);
    serde_json::from_str::<serde_json::Value>(&out).unwrap();
}
