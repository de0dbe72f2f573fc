mod common;

use common::*;
use hornclaw::engines::{
    bounded_refutation, check_model, karr_affine, karr_model, lia_sat, replay, solve, CheckResult, ExternalAnswer,
    Refutation, SolveConfig, Strategy, Verdict,
};
use hornclaw::horn::HornSystem;
use hornclaw::io::{parse_model, parse_smtlib};
use num::{BigInt, BigRational};

fn sys(text: &str) -> HornSystem {
    parse_smtlib(text).unwrap()
}

fn q(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

const DIAGONAL: &str = "(declare-fun p (Int Int) Bool)
    (assert (p 0 0))
    (assert (forall ((x Int) (y Int)) (=> (p x y) (p (+ x 1) (+ y 1)))))";

#[test]
fn karr_finds_the_diagonal() {
    let s = sys(DIAGONAL);
    let inv = &karr_affine(&s)["p"];
    assert_eq!(inv.space.dimension(), Some(1));
    assert!(inv.space.entails(&[q(1), q(-1)], &q(0)));
    assert!(!inv.space.entails(&[q(1), q(0)], &q(0)));
    assert!(check_model(&s, &karr_model(&s, &karr_affine(&s))).unwrap().is_valid());
}

#[test]
fn karr_leaves_unreachable_predicates_empty() {
    let s = sys("(declare-fun p (Int) Bool)
        (declare-fun r (Int) Bool)
        (assert (p 1))
        (assert (forall ((x Int)) (=> (r x) (p x))))");
    let inv = karr_affine(&s);
    assert!(inv["r"].space.is_bottom());
    assert_eq!(inv["p"].space.dimension(), Some(0));
    assert!(inv["p"].space.contains(&[q(1)]));
}

#[test]
fn karr_alone_cannot_prove_mccarthy() {
    let s = program("mccarthy");
    let m = karr_model(&s, &karr_affine(&s));
    // Affine facts alone cannot exclude the goal here.
    assert!(!check_model(&s, &m).unwrap().is_valid());
}

#[test]
fn check_model_accepts_and_rejects() {
    let s = parse_smtlib(&read("examples/smt/mccarthy.smt2")).unwrap();
    let good = parse_model(&read("examples/models/mc_invariant.model"), &s).unwrap();
    assert_eq!(check_model(&s, &good).unwrap(), CheckResult::Valid);
    let bad = parse_model(&read("examples/models/mc_trivial.model"), &s).unwrap();
    assert!(matches!(check_model(&s, &bad).unwrap(), CheckResult::Invalid { .. }));
}

#[test]
fn zero_depth_refutation_finds_nothing() {
    assert!(matches!(bounded_refutation(&program("mccarthy_bug"), 0), Refutation::NoneFound { .. }));
}

#[test]
fn bug_variants_are_refuted_and_replayed() {
    for name in ["mccarthy_bug", "example1_bug", "example2_bug"] {
        let s = program(name);
        let Refutation::Unsat(d) = bounded_refutation(&s, 8) else { panic!("{name}: no refutation") };
        replay(&s, &d).unwrap();
        assert!(d.height() <= 8);
    }
}

#[test]
fn safe_three_clause_system_has_no_short_refutation() {
    assert!(matches!(bounded_refutation(&ev_three(), 8), Refutation::NoneFound { .. }));
}

#[test]
fn trivial_systems() {
    let unsat = sys("(assert false)");
    let out = solve(&unsat, &SolveConfig::default());
    assert!(matches!(out.verdict, Verdict::Unsat(_)));
    let empty = sys("");
    assert!(matches!(solve(&empty, &SolveConfig::default()).verdict, Verdict::Sat(_)));
}

#[test]
fn sat_verdicts_carry_checked_models() {
    for name in ["example1", "twice"] {
        let s = program(name);
        match solve(&s, &SolveConfig::default()).verdict {
            Verdict::Sat(m) => assert!(check_model(&s, &m).unwrap().is_valid(), "{name}"),
            other => panic!("{name}: {}", other.name()),
        }
    }
}

#[test]
fn inequality_invariants_are_out_of_reach() {
    // sum n >= 0 needs an inequality; affine equalities cannot express it.
    assert!(matches!(solve(&program("sum"), &SolveConfig::default()).verdict, Verdict::Unknown(_)));
}

#[test]
fn external_answers_are_not_certificates() {
    let s = program("mccarthy");
    let fake = |_: &HornSystem| ExternalAnswer::Sat;
    let cfg = SolveConfig { strategy: "external".parse().unwrap(), external: Some(&fake), ..SolveConfig::default() };
    let out = solve(&s, &cfg);
    assert!(matches!(out.verdict, Verdict::Unknown(_)));
    assert_eq!(out.external, Some(ExternalAnswer::Sat));
}

#[test]
fn strategy_syntax() {
    assert_eq!("portfolio".parse::<Strategy>().unwrap(), Strategy::default());
    assert_eq!("karr+reverse".parse::<Strategy>().unwrap().to_string(), "karr+reverse-karr");
    assert!("magic".parse::<Strategy>().is_err());
}

#[test]
fn lia_handles_divisibility_and_bounds() {
    let s = sys("(declare-fun p (Int Int) Bool)
        (assert (forall ((x Int) (y Int)) (=> (and (= (* 2 x) (+ (* 4 y) 1))) (p x y))))");
    assert!(lia_sat(&s.clauses[0].constraint).is_unsat());
    let t = sys("(declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> (and (> (* 3 x) 4) (< (* 3 x) 6)) (p x))))");
    assert!(lia_sat(&t.clauses[0].constraint).is_unsat());
    let u = sys("(declare-fun p (Int) Bool)
        (assert (forall ((x Int)) (=> (and (> (* 3 x) 4) (< (* 3 x) 7)) (p x))))");
    assert!(lia_sat(&u.clauses[0].constraint).is_sat());
}
