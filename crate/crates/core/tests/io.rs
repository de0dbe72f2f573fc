mod common;

use common::*;
use hornclaw::engines::ExternalAnswer;
use hornclaw::horn::canon::equivalent_up_to_renaming;
use hornclaw::horn::HornSystem;
use hornclaw::io::{
    emit_smtlib, emitted_pred_names, parse_model, parse_smtlib, parse_templates, run_external_solver, run_solve,
    write_model, write_templates, IoError, PipelineConfig,
};
use std::process::Command;
use std::time::Duration;

fn z3() -> Option<String> {
    let ok = Command::new("z3").arg("-version").output().map(|o| o.status.success()).unwrap_or(false);
    ok.then(|| "z3".to_string())
}

#[test]
fn empty_system_emits_only_framing() {
    let text = emit_smtlib(&HornSystem::default()).unwrap();
    assert!(text.contains("(set-logic HORN)"));
    assert!(text.contains("(check-sat)"));
    assert!(!text.contains("declare-fun"));
    assert!(!text.contains("assert"));
}

#[test]
fn mccarthy_emission_shape() {
    let text = emit_smtlib(&program("mccarthy")).unwrap();
    assert_eq!(text.matches("(declare-fun").count(), 1);
    assert_eq!(text.matches("(assert").count(), 3);
    assert!(!text.contains("declare-datatypes"));
}

#[test]
fn closure_datatypes_are_declared() {
    let text = emit_smtlib(&program("example2")).unwrap();
    assert!(text.contains("(declare-datatypes"));
    let back = parse_smtlib(&text).unwrap();
    let s = program("example2");
    assert!(equivalent_up_to_renaming(&s, &back, &emitted_pred_names(&s)));
}

#[test]
fn non_horn_input_is_a_fragment_error() {
    let err = parse_smtlib(&read("examples/smt/non_horn.smt2")).unwrap_err();
    assert!(matches!(err, IoError::Fragment { .. }), "{err}");
}

#[test]
fn syntax_errors_carry_locations() {
    let err = parse_smtlib("(declare-fun p (Int) Bool)\n(assert (p x)").unwrap_err();
    assert!(matches!(err, IoError::Syntax { .. }), "{err}");
    let err = parse_smtlib("(assert (q 1))").unwrap_err();
    assert!(err.to_string().starts_with("1:"), "{err}");
}

#[test]
fn hand_written_script_parses() {
    let s = parse_smtlib(&read("examples/smt/ev3.smt2")).unwrap();
    assert_eq!(s.clauses.len(), 3);
    assert_eq!(s.clauses.iter().filter(|c| c.is_goal()).count(), 1);
}

#[test]
fn quantified_atoms_cannot_be_emitted() {
    let qa = hornclaw::transforms::quantified_abstraction(&ev_four(), 2, &["Ev_clo2"]).unwrap();
    assert!(matches!(emit_smtlib(&qa), Err(IoError::QuantifiedAtoms)));
}

#[test]
fn model_and_template_files_round_trip() {
    let s = parse_smtlib(&read("examples/smt/mccarthy.smt2")).unwrap();
    let m = parse_model(&read("examples/models/mc_invariant.model"), &s).unwrap();
    assert_eq!(parse_model(&write_model(&m), &s).unwrap(), m);
    let t = parse_templates(&read("examples/templates/ev.templates")).unwrap();
    assert_eq!(parse_templates(&write_templates(&t)).unwrap(), t);
}

#[test]
fn model_for_unknown_predicate_is_rejected() {
    let s = parse_smtlib(&read("examples/smt/mccarthy.smt2")).unwrap();
    assert!(parse_model("(define-interp (nope ((x Int))) (cases (_ true)))", &s).is_err());
}

#[test]
fn external_solver_agrees_on_trivial_unsat() {
    let Some(cmd) = z3() else { return };
    let s = parse_smtlib(&read("examples/smt/trivially_unsat.smt2")).unwrap();
    assert_eq!(run_external_solver(&s, &cmd, Duration::from_secs(30)).unwrap(), ExternalAnswer::Unsat);
}

#[test]
fn missing_external_solver_is_an_error() {
    let s = parse_smtlib("(assert false)").unwrap();
    assert!(run_external_solver(&s, "/nonexistent/solver", Duration::from_secs(5)).is_err());
}

#[test]
fn reports_are_deterministic_up_to_timings() {
    let run = || {
        let cfg = PipelineConfig::new(root().join("examples/programs/example1.hof"));
        let (_, r) = run_solve(&cfg).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        v.as_object_mut().unwrap().remove("timings_ms");
        for a in v["attempts"].as_array_mut().unwrap() {
            a.as_object_mut().unwrap().remove("millis");
        }
        v
    };
    let a = run();
    assert_eq!(a["verdict"], "sat");
    assert_eq!(a["certified"], true);
    assert_eq!(a, run());
}
