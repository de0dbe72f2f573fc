mod common;

use common::*;
use hornclaw::encoder::EncodingOptions;
use hornclaw::engines::{bounded_refutation, check_model, solve, Refutation, SolveConfig, Verdict};
use hornclaw::horn::canon::{equivalent_up_to_renaming, system_keys};
use hornclaw::horn::LinExpr;
use hornclaw::horn::Model;
use hornclaw::io::{parse_model, parse_smtlib};
use hornclaw::transforms::{
    eliminate_by_resolution, inline_predicate, instantiate, quantified_abstraction, remove_tautologies,
    remove_unused_args, reverse_rules, AtomPos, InstantiationTemplate, TransformError,
};

fn sys(text: &str) -> hornclaw::horn::HornSystem {
    parse_smtlib(text).unwrap()
}

#[test]
fn identity_merge_is_a_no_op() {
    let s = program("example2");
    assert_eq!(inline_predicate(&s, "Ev_clo2", "Ev_clo2").unwrap(), s);
}

#[test]
fn merge_rejects_different_signatures() {
    let s = program("example2");
    assert!(matches!(inline_predicate(&s, "main", "Ev_clo2"), Err(TransformError::SignatureMismatch { .. })));
    assert!(matches!(inline_predicate(&s, "nope", "Ev_clo2"), Err(TransformError::UnknownPredicate(_))));
}

#[test]
fn merged_system_has_one_tautology() {
    let merged = inline_predicate(&program("example2"), "app1", "Ev_clo2").unwrap();
    assert_eq!(merged.clauses.len(), 5);
    assert_eq!(remove_tautologies(&merged).clauses.len(), 4);
}

#[test]
fn tautology_removal_without_tautologies_is_identity() {
    let s = program("mccarthy");
    assert_eq!(system_keys(&remove_tautologies(&s)), system_keys(&s));
}

#[test]
fn constrained_self_implication_is_a_tautology() {
    let s = sys("(declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> (and (p x) (> x 0)) (p x))))
        (assert (forall ((x Int)) (=> (= x 3) (p x))))");
    let pruned = remove_tautologies(&s);
    assert_eq!(pruned.clauses.len(), 1);
    // Any interpretation satisfies the dropped clause.
    let m = parse_model("(define-interp (p ((x Int))) (cases (_ (= x 3))))", &s).unwrap();
    assert!(check_model(&s, &m).unwrap().is_valid());
    assert!(check_model(&pruned, &m).unwrap().is_valid());
}

#[test]
fn resolution_composes_by_hand_result() {
    // Resolving Ev(succ f, i) → Ev(f, i) against Ev(f', x+1) → Ev(succ f', x).
    let resolved = ev_three();
    let expected = sys("(declare-datatypes ((clo2 0)) (((check (check.0 Int)) (succ (succ.0 clo2)))))
        (declare-fun Ev_clo2 (clo2 Int) Bool)
        (assert (forall ((f clo2) (x Int)) (=> (Ev_clo2 f (+ x 1)) (Ev_clo2 f x))))
        (assert (forall ((i Int)) (=> (Ev_clo2 (check i) i) false)))
        (assert (forall ((x Int) (y Int)) (=> (> x y) (Ev_clo2 (check x) y))))");
    assert!(equivalent_up_to_renaming(&expected, &resolved, &Default::default()));
    let script = parse_smtlib(&read("examples/smt/ev3.smt2")).unwrap();
    let m = parse_model(&read("examples/models/ev3.model"), &script).unwrap();
    assert!(check_model(&script, &m).unwrap().is_valid());
    assert!(matches!(bounded_refutation(&resolved, 6), Refutation::NoneFound { .. }));
}

#[test]
fn resolution_needs_a_single_producer() {
    let s = sys("(declare-datatypes ((d 0)) (((k (k.0 Int)) (j (j.0 d)))))
        (declare-fun p (d) Bool)
        (assert (forall ((x Int)) (p (j (k x)))))
        (assert (forall ((y d)) (=> (p y) (p (j y)))))
        (assert (forall ((y d)) (=> (p (j y)) false)))");
    assert!(matches!(eliminate_by_resolution(&s, "j"), Err(TransformError::Precondition(_))));
    assert!(matches!(eliminate_by_resolution(&s, "nope"), Err(TransformError::UnknownConstructor(_))));
}

#[test]
fn unused_result_of_g_is_dropped() {
    let opts = EncodingOptions { drop_unused_args: false, ..EncodingOptions::default() };
    let s = encode("examples/programs/example1.hof", &opts);
    let r = remove_unused_args(&s);
    assert_eq!(r.pred("g").unwrap().sorts.len(), 1);
    assert!(matches!(solve(&r, &SolveConfig::default()).verdict, Verdict::Sat(_)));
    assert!(matches!(solve(&s, &SolveConfig::default()).verdict, Verdict::Sat(_)));
}

#[test]
fn unused_args_fixpoint_and_degenerate_cases() {
    let read_all = sys("(declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> (= x 1) (p x))))
        (assert (forall ((x Int)) (=> (and (p x) (> x 1)) false)))");
    assert_eq!(remove_unused_args(&read_all), read_all);
    let unused = sys("(declare-fun p (Int Int) Bool)
        (assert (forall ((x Int) (y Int)) (p x y)))
        (assert (forall ((x Int) (y Int)) (=> (p x y) false)))");
    assert!(remove_unused_args(&unused).pred("p").unwrap().sorts.is_empty());
}

#[test]
fn reversal_of_instantiated_system_matches_display() {
    let r = reverse_rules(&ev_instantiated()).unwrap();
    let expected = sys("(declare-datatypes ((clo2 0)) (((check (check.0 Int)) (succ (succ.0 clo2)))))
        (declare-fun Ev_clo2 (Int Int clo2 Int) Bool)
        (assert (forall ((u Int) (v Int) (f clo2) (i Int)) (=> (Ev_clo2 u v f i) (Ev_clo2 u v (succ f) i))))
        (assert (forall ((i Int)) (Ev_clo2 i i (check i) i)))
        (assert (forall ((u Int) (v Int) (f clo2) (x Int)) (=> (Ev_clo2 u (+ v 1) (succ f) x) (Ev_clo2 u v f (+ x 1)))))
        (assert (forall ((u Int) (v Int) (x Int) (y Int)) (=> (and (Ev_clo2 u v (check x) y) (> x y)) false)))");
    assert!(equivalent_up_to_renaming(&expected, &r, &Default::default()), "{r}");
}

#[test]
fn reversal_rejects_nonlinear_clauses() {
    assert!(matches!(reverse_rules(&program("mccarthy")), Err(TransformError::Nonlinear(1))));
}

#[test]
fn abstraction_edge_cases() {
    let s = ev_four();
    assert_eq!(quantified_abstraction(&s, 0, &["Ev_clo2"]).unwrap(), s);
    assert!(matches!(quantified_abstraction(&s, 2, &["nope"]), Err(TransformError::UnknownPredicate(_))));
}

fn fill(t: &mut InstantiationTemplate, terms: impl Fn() -> Vec<LinExpr>) {
    for (i, pos) in [
        (0, AtomPos::Body(0)),
        (0, AtomPos::Head),
        (1, AtomPos::Head),
        (2, AtomPos::Body(0)),
        (2, AtomPos::Head),
        (3, AtomPos::Body(0)),
    ] {
        t.set(i, pos, terms());
    }
}

#[test]
fn constant_templates_give_constant_columns() {
    let qa = quantified_abstraction(&ev_four(), 2, &["Ev_clo2"]).unwrap();
    let mut t = InstantiationTemplate::new();
    fill(&mut t, || vec![LinExpr::constant(0), LinExpr::constant(0)]);
    let inst = instantiate(&qa, &t).unwrap();
    assert!(hornclaw::horn::validate(&inst).is_empty());
    assert!(!inst.has_quantified_atoms());
    let m: Model = parse_model(
        "(define-interp (Ev_clo2 ((a Int) (b Int) (f clo2) (y Int))) (cases (_ (and (= a 0) (= b 0)))))",
        &inst,
    )
    .unwrap();
    // Only the constant columns are pinned; the goal still fails.
    assert!(!check_model(&inst, &m).unwrap().is_valid());
}

#[test]
fn template_length_is_checked() {
    let qa = quantified_abstraction(&ev_four(), 2, &["Ev_clo2"]).unwrap();
    let mut t = InstantiationTemplate::new();
    fill(&mut t, || vec![LinExpr::constant(0)]);
    assert!(matches!(instantiate(&qa, &t), Err(TransformError::TemplateArity { expected: 2, found: 1, .. })));
    assert!(matches!(instantiate(&qa, &InstantiationTemplate::new()), Err(TransformError::MissingTemplate { .. })));
}
