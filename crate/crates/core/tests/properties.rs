mod common;

use common::*;
use hornclaw::engines::{check_model, karr_affine, karr_model};
use hornclaw::horn::canon::{equivalent_up_to_renaming, system_keys};
use hornclaw::io::{emit_smtlib, emitted_pred_names, parse_model, parse_smtlib, write_model};
use hornclaw::transforms::reverse_rules;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn lia_matches_exhaustive_search(seed in any::<u64>()) {
        let f = random_conjunction(&mut StdRng::seed_from_u64(seed));
        prop_assert_eq!(lia_agrees(&f), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn karr_equalities_hold_on_derivable_facts(seed in any::<u64>()) {
        let s = random_system(&mut StdRng::seed_from_u64(seed));
        let r = karr_inductive(&s, 4);
        prop_assert!(r.is_ok(), "{}\n{}", r.unwrap_err(), s);
    }

    #[test]
    fn reversal_is_an_involution(seed in any::<u64>()) {
        let s = random_system(&mut StdRng::seed_from_u64(seed));
        let twice = reverse_rules(&reverse_rules(&s).unwrap()).unwrap();
        prop_assert_eq!(system_keys(&twice), system_keys(&s));
    }

    #[test]
    fn smtlib_round_trip(seed in any::<u64>()) {
        let s = random_system(&mut StdRng::seed_from_u64(seed));
        let back = parse_smtlib(&emit_smtlib(&s).unwrap()).unwrap();
        prop_assert!(equivalent_up_to_renaming(&s, &back, &emitted_pred_names(&s)));
    }

    #[test]
    fn karr_model_never_breaks_facts(seed in any::<u64>()) {
        // A Karr model may fail on goals, never on a clause without them.
        let s = random_system(&mut StdRng::seed_from_u64(seed));
        let mut facts = s.clone();
        facts.clauses.retain(|c| !c.is_goal());
        let m = karr_model(&facts, &karr_affine(&facts));
        let r = check_model(&facts, &m).unwrap();
        prop_assert!(!matches!(r, hornclaw::engines::CheckResult::Invalid { .. }), "{}\n{}", r, facts);
    }
}

#[test]
fn corpus_round_trips() {
    for (name, s) in corpus() {
        if s.has_quantified_atoms() {
            continue;
        }
        let text = emit_smtlib(&s).unwrap();
        let back = parse_smtlib(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert!(equivalent_up_to_renaming(&s, &back, &emitted_pred_names(&s)), "{name}");
        assert_eq!(emit_smtlib(&back).unwrap(), text, "{name}: emission is not a fixpoint");
    }
}

#[test]
fn corpus_reversal_involution() {
    for (name, s) in corpus() {
        if s.has_quantified_atoms() || s.clauses.iter().any(|c| c.body.len() > 1) {
            continue;
        }
        let twice = reverse_rules(&reverse_rules(&s).unwrap()).unwrap();
        assert_eq!(system_keys(&twice), system_keys(&s), "{name}");
    }
}

#[test]
fn corpus_karr_inductive() {
    for (name, s) in corpus() {
        if !s.has_quantified_atoms() {
            karr_inductive(&s, 5).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn model_files_round_trip() {
    for (sys, model) in [
        ("examples/smt/mccarthy.smt2", "examples/models/mc_invariant.model"),
        ("examples/smt/mccarthy.smt2", "examples/models/mc_trivial.model"),
        ("examples/smt/ev3.smt2", "examples/models/ev3.model"),
    ] {
        let s = parse_smtlib(&read(sys)).unwrap();
        let m = parse_model(&read(model), &s).unwrap();
        let again = parse_model(&write_model(&m), &s).unwrap();
        assert_eq!(m, again, "{model}");
    }
}
