//! One line per acceptance criterion. Expected systems are written out by
//! hand below and compared up to variable and predicate renaming.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use hornclaw::encoder::{encode_source, EncodingOptions};
use hornclaw::engines::{
    check_model, karr_affine, replay, solve, solve_nonrecursive, CheckResult, Engine, SolveConfig, Strategy, Verdict,
};
use hornclaw::horn::canon::{clause_key, equivalent_up_to_renaming, system_keys};
use hornclaw::horn::{Clause, Formula, Head, HornSystem, LinExpr, PredApp, Sort, Term};
use hornclaw::io::{
    emit_smtlib, emitted_pred_names, parse_model, parse_smtlib, run_external_solver, EXTERNAL_SOLVER_ENV,
};
use hornclaw::transforms::{
    eliminate_by_resolution, inline_predicate, quantified_abstraction, remove_tautologies, reverse_rules,
};
use num::{BigInt, BigRational};

type Outcome = Result<String, String>;

const SKIP: &str = "\u{0}skip";

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:?}, limit {limit:?}"))
}

fn smt(text: &str) -> HornSystem {
    parse_smtlib(text).unwrap_or_else(|e| panic!("oracle script: {e}"))
}

fn same(expected: &HornSystem, actual: &HornSystem, renames: &[(&str, &str)], what: &str) -> Result<(), String> {
    let map: BTreeMap<String, String> = renames.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    ensure(
        equivalent_up_to_renaming(expected, actual, &map),
        format!("{what} differs:\nexpected\n{expected}\nactual\n{actual}"),
    )
}

fn valid(sys: &HornSystem, model_text: &str) -> Result<(), String> {
    let m = parse_model(model_text, sys).map_err(|e| e.to_string())?;
    match check_model(sys, &m).map_err(|e| e.to_string())? {
        CheckResult::Valid => Ok(()),
        other => Err(format!("check_model: {other}")),
    }
}

const MCCARTHY: &str = "
(set-logic HORN)
(declare-fun mc (Int Int) Bool)
(assert (forall ((x Int)) (=> (> x 100) (mc x (- x 10)))))
(assert (forall ((x Int) (y Int) (z Int)) (=> (and (<= x 100) (mc (+ x 11) y) (mc y z)) (mc x z))))
(assert (forall ((x Int) (y Int)) (=> (and (<= x 101) (mc x y)) (= y 91))))
";

fn criterion1() -> Outcome {
    let t = Instant::now();
    let sys = program("mccarthy");
    ensure(sys.clauses.len() == 3, format!("{} clauses", sys.clauses.len()))?;
    same(&smt(MCCARTHY), &sys, &[], "McCarthy system")?;
    valid(&sys, &read("examples/models/mc_invariant.model"))?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("3 clauses match the oracle, invariant Valid ({:?})", t.elapsed()))
}

const EXAMPLE1: &str = "
(set-logic HORN)
(declare-datatypes ((Unit 0)) (((unit))))
(declare-fun Ev (Int Int) Bool)
(declare-fun f (Int Int) Bool)
(declare-fun g (Int Unit) Bool)
(declare-fun hh (Int Unit Int) Bool)
(assert (forall ((x Int) (r Int)) (=> (hh x unit r) (Ev x r))))
(assert (forall ((x Int) (y Int) (r1 Int) (r2 Int)) (=> (and (Ev x r1) (Ev y r2) (> r1 0) (< r2 0)) (f x y))))
(assert (forall ((x Int) (y Unit)) (hh x y x)))
(assert (forall ((n Int) (r Unit)) (=> (f n n) (g n r))))
(assert (forall ((n Int) (r Unit)) (=> (g n r) false)))
";

fn criterion2() -> Outcome {
    let t = Instant::now();
    let src = read("examples/programs/example1.hof");
    let canonical = encode_source(&src, &EncodingOptions::canonical()).map_err(|e| e.to_string())?;
    let keys = system_keys(&canonical);
    let sorts: BTreeMap<String, Sort> = [
        ("x".to_string(), Sort::Int),
        ("r".to_string(), Sort::Int),
        ("ok".to_string(), Sort::Bool),
        ("n".to_string(), Sort::Int),
        ("u".to_string(), Sort::Unit),
    ]
    .into();
    let v = |n: &str| Term::var_of(n, &sorts[n]);
    let ev_rule = Clause::build(
        &sorts,
        vec![PredApp::new("h", vec![v("x"), Term::Unit, v("r"), v("ok")])],
        Formula::True,
        Head::Pred(PredApp::new("Ev", vec![Term::Ctor("h".into(), vec![v("x")]), Term::Unit, v("r"), v("ok")])),
    );
    let goal = Clause::build(
        &sorts,
        vec![PredApp::new("g", vec![v("n"), v("u"), Term::Bool(false)])],
        Formula::True,
        Head::False,
    );
    ensure(keys.contains(&clause_key(&ev_rule)), format!("no Ev rule {ev_rule} in\n{canonical}"))?;
    ensure(keys.contains(&clause_key(&goal)), format!("no goal {goal} in\n{canonical}"))?;

    let opts = EncodingOptions { drop_unused_args: false, ..EncodingOptions::default() };
    let specialized = encode_source(&src, &opts).map_err(|e| e.to_string())?;
    same(&smt(EXAMPLE1), &specialized, &[("hh", "h")], "specialized example 1")?;
    let m = match solve_nonrecursive(&specialized).map_err(|e| e.to_string())? {
        Verdict::Sat(m) => m,
        v => return Err(format!("solve_nonrecursive: {}", v.name())),
    };
    ensure(check_model(&specialized, &m).map_err(|e| e.to_string())?.is_valid(), "model not certified")?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("canonical rules present, 5 clauses match the oracle, SAT certified ({:?})", t.elapsed()))
}

const EX2_HEADER: &str = "
(set-logic HORN)
(declare-datatypes ((clo2 0)) (((check (check.0 Int)) (succ (succ.0 clo2)))))
(declare-fun Ev (clo2 Int) Bool)
";

const EXAMPLE2: &str = "
(declare-fun app1 (clo2 Int) Bool)
(declare-fun succ_p (clo2 Int) Bool)
(declare-fun check_p (Int Int) Bool)
(declare-fun main (Int) Bool)
(assert (forall ((f clo2) (i Int)) (=> (app1 (succ f) i) (app1 f i))))
(assert (forall ((f clo2) (i Int)) (=> (Ev f i) (app1 f i))))
(assert (forall ((f clo2) (x Int)) (=> (Ev f (+ x 1)) (succ_p f x))))
(assert (forall ((x Int) (y Int)) (=> (> x y) (check_p x y))))
(assert (forall ((i Int)) (=> (app1 (check i) i) (main i))))
(assert (forall ((i Int)) (=> (main i) false)))
(assert (forall ((f clo2) (x Int)) (=> (succ_p f x) (Ev (succ f) x))))
(assert (forall ((x Int) (y Int)) (=> (check_p x y) (Ev (check x) y))))
";

const MERGED: &str = "
(assert (forall ((f clo2) (i Int)) (=> (Ev (succ f) i) (Ev f i))))
(assert (forall ((f clo2) (i Int)) (=> (Ev f i) (Ev f i))))
(assert (forall ((i Int)) (=> (Ev (check i) i) false)))
(assert (forall ((f clo2) (x Int)) (=> (Ev f (+ x 1)) (Ev (succ f) x))))
(assert (forall ((x Int) (y Int)) (=> (> x y) (Ev (check x) y))))
";

const RESOLVED: &str = "
(assert (forall ((i Int)) (=> (Ev (check i) i) false)))
(assert (forall ((f clo2) (x Int)) (=> (Ev f (+ x 1)) (Ev f x))))
(assert (forall ((x Int) (y Int)) (=> (> x y) (Ev (check x) y))))
";

fn criterion3() -> Outcome {
    let t = Instant::now();
    let src = read("examples/programs/example2.hof");
    let canonical = encode_source(&src, &EncodingOptions::canonical()).map_err(|e| e.to_string())?;
    let adts: Vec<String> = canonical.datatypes.iter().map(|d| d.to_string()).collect();
    ensure(
        adts.iter().any(|d| d == "clo1 ::= app2 Int") && adts.iter().any(|d| d == "clo2 ::= check Int | succ clo2"),
        format!("datatypes {adts:?}"),
    )?;
    let sys = program("example2");
    ensure(!sys.clauses.iter().any(|c| c.to_string().contains("app2(")), "clo1 appears in clauses")?;
    let ev = [("Ev", "Ev_clo2"), ("succ_p", "succ"), ("check_p", "check")];
    same(&smt(&format!("{EX2_HEADER}{EXAMPLE2}")), &sys, &ev, "8-clause system")?;
    let merged = inline_predicate(&sys, "app1", "Ev_clo2").map_err(|e| e.to_string())?;
    same(&smt(&format!("{EX2_HEADER}{MERGED}")), &merged, &ev, "merged system")?;
    let resolved = eliminate_by_resolution(&remove_tautologies(&merged), "succ").map_err(|e| e.to_string())?;
    same(&smt(&format!("{EX2_HEADER}{RESOLVED}")), &resolved, &ev, "resolved system")?;
    valid(&resolved, "(define-interp (Ev_clo2 ((f clo2) (y Int))) (cases (((f (check a))) (> a y)) (_ false)))")?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("ADTs, 8 -> 5 -> 3 clauses match the oracle, derived interpretation Valid ({:?})", t.elapsed()))
}

const INSTANTIATED: &str = "
(declare-fun Ev4 (Int Int clo2 Int) Bool)
(assert (forall ((u Int) (v Int) (f clo2) (i Int)) (=> (Ev4 u v (succ f) i) (Ev4 u v f i))))
(assert (forall ((i Int)) (=> (Ev4 i i (check i) i) false)))
(assert (forall ((u Int) (v Int) (f clo2) (x Int)) (=> (Ev4 u v f (+ x 1)) (Ev4 u (+ v 1) (succ f) x))))
(assert (forall ((u Int) (v Int) (x Int) (y Int)) (=> (> x y) (Ev4 u v (check x) y))))
";

/// The quantified system, built directly.
fn quantified_oracle(ev4: &HornSystem) -> HornSystem {
    let mut s = ev4.clone();
    let sorts: BTreeMap<String, Sort> =
        [("f", Sort::Adt("clo2".into())), ("i", Sort::Int), ("x", Sort::Int), ("y", Sort::Int)]
            .into_iter()
            .map(|(v, s)| (v.to_string(), s))
            .collect();
    let z = ["z1".to_string(), "z2".to_string()];
    let q = |args: Vec<Term>| {
        let mut all = vec![Term::int_var("z1"), Term::int_var("z2")];
        all.extend(args);
        PredApp { pred: "Ev_clo2".into(), args: all, bound: z.to_vec() }
    };
    let f = || Term::var_of("f", &sorts["f"]);
    let int = |n: &str| Term::int_var(n);
    let plus1 = Term::Int(LinExpr::var("x").add_constant(1));
    let succ = |t: Term| Term::Ctor("succ".into(), vec![t]);
    let check = |t: Term| Term::Ctor("check".into(), vec![t]);
    let gt = Formula::cmp(&LinExpr::var("x"), hornclaw::horn::CmpOp::Gt, &LinExpr::var("y"));
    s.clauses = vec![
        Clause::build(&sorts, vec![q(vec![succ(f()), int("i")])], Formula::True, Head::Pred(q(vec![f(), int("i")]))),
        Clause::build(&sorts, vec![q(vec![check(int("i")), int("i")])], Formula::True, Head::False),
        Clause::build(&sorts, vec![q(vec![f(), plus1])], Formula::True, Head::Pred(q(vec![succ(f()), int("x")]))),
        Clause::build(&sorts, vec![], gt, Head::Pred(q(vec![check(int("x")), int("y")]))),
    ];
    s
}

fn criterion4() -> Outcome {
    let t = Instant::now();
    let four = ev_four();
    let qa = quantified_abstraction(&four, 2, &["Ev_clo2"]).map_err(|e| e.to_string())?;
    let oracle = quantified_oracle(&qa);
    ensure(system_keys(&qa) == system_keys(&oracle), format!("quantified system differs:\n{qa}\nexpected\n{oracle}"))?;
    let inst = ev_instantiated();
    same(&smt(&format!("{EX2_HEADER}{INSTANTIATED}")), &inst, &[("Ev4", "Ev_clo2")], "instantiated system")?;
    let inv = karr_affine(&reverse_rules(&inst).map_err(|e| e.to_string())?);
    let ev = inv.get("Ev_clo2").ok_or("no invariant for Ev_clo2")?;
    ensure(ev.positions == [0, 1, 3], format!("Int positions {:?}", ev.positions))?;
    let q = |k: i64| BigRational::from_integer(BigInt::from(k));
    ensure(ev.space.entails(&[q(2), q(-1), q(-1)], &q(0)), "Karr subspace does not entail 2u = v + i")?;
    let cfg = SolveConfig { strategy: Strategy(vec![Engine::ReverseKarr]), ..SolveConfig::default() };
    let out = solve(&inst, &cfg);
    let trail: Vec<String> = out.trail.iter().map(|a| format!("{}: {}", a.engine, a.outcome)).collect();
    ensure(
        matches!(out.verdict, Verdict::Sat(_)),
        format!(
            "quantified and instantiated clauses match, Karr entails 2u = v + i, but reverse+karr returns {} ({})",
            out.verdict.name(),
            trail.join("; ")
        ),
    )?;
    within(t, Duration::from_secs(5))?;
    Ok(format!("SAT certified ({:?})", t.elapsed()))
}

fn criterion5() -> Outcome {
    let mut lines = Vec::new();
    for name in ["mccarthy_bug", "example1_bug", "example2_bug"] {
        let t = Instant::now();
        let sys = program(name);
        let out = solve(&sys, &SolveConfig::default());
        let Verdict::Unsat(d) = &out.verdict else {
            return Err(format!("{name}: {}", out.verdict.name()));
        };
        replay(&sys, d).map_err(|e| format!("{name}: replay failed: {e}"))?;
        within(t, Duration::from_secs(5)).map_err(|e| format!("{name}: {e}"))?;
        lines.push(format!("{name} height {} ({:?})", d.height(), t.elapsed()));
    }
    Ok(format!("UNSAT with replayed derivations: {}", lines.join(", ")))
}

fn criterion6() -> Outcome {
    use rand::SeedableRng;
    let t = Instant::now();
    let corpus = corpus();
    let mut involutions = 0;
    for (name, s) in &corpus {
        if s.has_quantified_atoms() || s.clauses.iter().any(|c| c.body.len() > 1) {
            continue;
        }
        let r = reverse_rules(s).map_err(|e| format!("{name}: {e}"))?;
        let rr = reverse_rules(&r).map_err(|e| format!("{name}: {e}"))?;
        ensure(system_keys(&rr) == system_keys(s), format!("{name}: reverse is not an involution"))?;
        involutions += 1;
    }
    let mut karr = 0;
    for (name, s) in &corpus {
        if s.has_quantified_atoms() {
            continue;
        }
        karr_inductive(s, 5).map_err(|e| format!("{name}: {e}"))?;
        karr += 1;
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for i in 0..50 {
        let s = random_system(&mut rng);
        karr_inductive(&s, 5).map_err(|e| format!("random system {i}: {e}\n{s}"))?;
    }
    for _ in 0..500 {
        lia_agrees(&random_conjunction(&mut rng))?;
    }
    let mut trips = 0;
    for (name, s) in &corpus {
        if s.has_quantified_atoms() {
            continue;
        }
        let text = emit_smtlib(s).map_err(|e| format!("{name}: {e}"))?;
        let back = parse_smtlib(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure(equivalent_up_to_renaming(s, &back, &emitted_pred_names(s)), format!("{name}: round trip differs"))?;
        trips += 1;
    }
    within(t, Duration::from_secs(60))?;
    Ok(format!(
        "involution on {involutions} systems, Karr inductive on {karr} corpus + 50 random, 500 LIA checks, {trips} round trips ({:?})",
        t.elapsed()
    ))
}

fn external_command() -> Option<String> {
    if let Ok(c) = std::env::var(EXTERNAL_SOLVER_ENV) {
        return Some(c).filter(|c| !c.trim().is_empty());
    }
    let found = std::process::Command::new("z3").arg("-version").output().is_ok_and(|o| o.status.success());
    found.then(|| "z3".to_string())
}

fn criterion7() -> Outcome {
    let Some(cmd) = external_command() else {
        return Err(SKIP.into());
    };
    let timeout = Duration::from_secs(30);
    let sat = [
        ("mccarthy", program("mccarthy")),
        ("example1", program("example1")),
        ("example2 resolved", ev_three()),
        ("example2 instantiated", ev_instantiated()),
    ];
    let unsat = [
        ("mccarthy_bug", program("mccarthy_bug")),
        ("example1_bug", program("example1_bug")),
        ("example2_bug", program("example2_bug")),
    ];
    let mut bad = Vec::new();
    for (want, set) in [("sat", &sat[..]), ("unsat", &unsat[..])] {
        for (name, s) in set.iter() {
            let got = run_external_solver(s, &cmd, timeout).map_err(|e| e.to_string())?;
            let got = match got {
                hornclaw::engines::ExternalAnswer::Sat => "sat".to_string(),
                hornclaw::engines::ExternalAnswer::Unsat => "unsat".to_string(),
                hornclaw::engines::ExternalAnswer::Unknown(why) => {
                    format!("unknown ({})", why.lines().next().unwrap_or(""))
                }
            };
            if got != want {
                bad.push(format!("{name}: expected {want}, got {got}"));
            }
        }
    }
    ensure(bad.is_empty(), format!("`{cmd}`: {}", bad.join("; ")))?;
    Ok(format!("`{cmd}` agrees on 4 sat and 3 unsat scripts"))
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 7] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
    ];
    let mut failed = 0;
    for (n, run) in criteria {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("criterion {n}: PASS {detail}"),
            Err(e) if e == SKIP => {
                println!("criterion {n}: SKIP no external solver configured (set {EXTERNAL_SOLVER_ENV})")
            }
            Err(e) => {
                failed += 1;
                println!("criterion {n}: FAIL {e}");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
