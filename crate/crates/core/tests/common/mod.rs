#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hornclaw::encoder::{encode_source, EncodingOptions};
use hornclaw::engines::lia::{Lia, Validity};
use hornclaw::engines::{
    derivable_facts, eval_formula, karr_affine, lia_sat, Assignment, LiaResult, SearchLimits, Value,
};
use hornclaw::horn::{Clause, Formula, Head, HornSystem, LinExpr, PredApp, PredDecl, Rel, Sort, Term};
use hornclaw::io::{parse_smtlib, parse_templates};
use hornclaw::transforms::{
    eliminate_by_resolution, inline_predicate, instantiate, quantified_abstraction, remove_tautologies,
};
use num::integer::lcm;
use num::{BigInt, BigRational, ToPrimitive};
use rand::rngs::StdRng;
use rand::Rng;

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(root().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn encode(rel: &str, opts: &EncodingOptions) -> HornSystem {
    encode_source(&read(rel), opts).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn program(name: &str) -> HornSystem {
    encode(&format!("examples/programs/{name}.hof"), &EncodingOptions::default())
}

/// Example 2 after merging app1 into the evaluator and dropping the tautology.
pub fn ev_four() -> HornSystem {
    remove_tautologies(&inline_predicate(&program("example2"), "app1", "Ev_clo2").unwrap())
}

pub fn ev_three() -> HornSystem {
    eliminate_by_resolution(&ev_four(), "succ").unwrap()
}

pub fn ev_instantiated() -> HornSystem {
    let qa = quantified_abstraction(&ev_four(), 2, &["Ev_clo2"]).unwrap();
    instantiate(&qa, &parse_templates(&read("examples/templates/ev.templates")).unwrap()).unwrap()
}

fn files(dir: &str, ext: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(root().join(dir))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    out.sort();
    out
}

fn stem(p: &Path) -> String {
    p.file_stem().unwrap().to_string_lossy().into_owned()
}

/// Every system the examples produce: each program in both encodings, the
/// SMT-LIB scripts in the fragment, and the derived example-2 systems.
pub fn corpus() -> Vec<(String, HornSystem)> {
    let mut out = Vec::new();
    for p in files("examples/programs", "hof") {
        let src = std::fs::read_to_string(&p).unwrap();
        for (tag, opts) in [("specialized", EncodingOptions::default()), ("canonical", EncodingOptions::canonical())] {
            out.push((format!("{}/{tag}", stem(&p)), encode_source(&src, &opts).unwrap()));
        }
    }
    for p in files("examples/smt", "smt2") {
        if let Ok(s) = parse_smtlib(&std::fs::read_to_string(&p).unwrap()) {
            out.push((format!("{}.smt2", stem(&p)), s));
        }
    }
    out.push(("example2/merged".into(), ev_four()));
    out.push(("example2/resolved".into(), ev_three()));
    out.push(("example2/instantiated".into(), ev_instantiated()));
    out
}

fn rand_lin(rng: &mut StdRng, vars: &[&str], konst: i128) -> LinExpr {
    let terms: Vec<(String, i128)> = vars.iter().map(|v| (v.to_string(), rng.gen_range(-3..=3))).collect();
    LinExpr::from_parts(terms, rng.gen_range(-konst..=konst))
}

fn rand_rel(rng: &mut StdRng) -> Rel {
    [Rel::Eq, Rel::Ne, Rel::Le][rng.gen_range(0..3)]
}

/// A conjunction of 1 to 4 linear atoms over x, y, z.
pub fn random_conjunction(rng: &mut StdRng) -> Formula {
    let n = rng.gen_range(1..=4);
    Formula::and((0..n).map(|_| {
        let e = rand_lin(rng, &["x", "y", "z"], 10);
        Formula::lin(e, rand_rel(rng))
    }))
}

/// Compares `lia_sat` with exhaustive search over [-8, 8]³. The box is added
/// to the formula, so both sides decide the same question.
pub fn lia_agrees(f: &Formula) -> Result<(), String> {
    let boxed = Formula::and(
        ["x", "y", "z"]
            .iter()
            .flat_map(|v| {
                [
                    Formula::lin(LinExpr::var(*v).add_constant(-8), Rel::Le),
                    Formula::lin(LinExpr::term(-1, *v).add_constant(-8), Rel::Le),
                ]
            })
            .chain([f.clone()]),
    );
    let mut brute = None;
    'outer: for x in -8..=8 {
        for y in -8..=8 {
            for z in -8..=8 {
                let a: Assignment =
                    [("x", x), ("y", y), ("z", z)].iter().map(|(v, k)| (v.to_string(), Value::Int(*k))).collect();
                if eval_formula(f, &a) == Some(true) {
                    brute = Some(a);
                    break 'outer;
                }
            }
        }
    }
    match (lia_sat(&boxed), brute) {
        (LiaResult::Sat(a), Some(_)) if eval_formula(&boxed, &a) == Some(true) => Ok(()),
        (LiaResult::Sat(a), _) => Err(format!("{f}: bad witness {a:?}")),
        (LiaResult::Unsat, None) => Ok(()),
        (LiaResult::Unsat, Some(a)) => Err(format!("{f}: unsat but {a:?} satisfies it")),
        (LiaResult::Unknown(why), _) => Err(format!("{f}: unknown ({why})")),
    }
}

/// A linear Horn system over Int with at most 3 predicates of arity 1 or 2,
/// at most 5 clauses, at most one body atom per clause and coefficients in
/// [-3, 3]. The first clause is a fact so the system is never trivially empty.
pub fn random_system(rng: &mut StdRng) -> HornSystem {
    let mut s = HornSystem::new();
    let npreds = rng.gen_range(1..=3);
    for i in 0..npreds {
        s.preds.push(PredDecl::new(format!("p{i}"), vec![Sort::Int; rng.gen_range(1..=2)]));
    }
    let vars = ["x", "y", "z"];
    let sorts: BTreeMap<String, Sort> = vars.iter().map(|v| (v.to_string(), Sort::Int)).collect();
    let atom = |rng: &mut StdRng, s: &HornSystem| {
        let d = &s.preds[rng.gen_range(0..s.preds.len())];
        let args = (0..d.sorts.len()).map(|_| Term::Int(rand_lin(rng, &vars, 3))).collect();
        PredApp::new(d.name.clone(), args)
    };
    for i in 0..rng.gen_range(1..=5) {
        let body = if i == 0 || rng.gen_bool(0.3) { Vec::new() } else { vec![atom(rng, &s)] };
        let constraint =
            Formula::and((0..rng.gen_range(0..=2)).map(|_| Formula::lin(rand_lin(rng, &vars, 5), rand_rel(rng))));
        let head = if i > 0 && rng.gen_bool(0.15) { Head::False } else { Head::Pred(atom(rng, &s)) };
        s.clauses.push(Clause::build(&sorts, body, constraint, head));
    }
    s
}

/// Checks that every fact derivable with height ≤ `depth` satisfies the
/// Karr equalities of its predicate.
pub fn karr_inductive(s: &HornSystem, depth: usize) -> Result<usize, String> {
    let inv = karr_affine(s);
    let (facts, _) = derivable_facts(s, depth, SearchLimits { max_steps: 5_000, lia_budget: 1_000 });
    for fact in &facts {
        let Some(pi) = inv.get(&fact.pred) else { continue };
        let args: Vec<LinExpr> = pi
            .positions
            .iter()
            .map(|&i| match &fact.args[i] {
                Term::Int(e) => e.clone(),
                Term::Var(v) => LinExpr::var(v.clone()),
                t => panic!("non-integer argument {t}"),
            })
            .collect();
        if pi.space.is_bottom() {
            return Err(format!(
                "{}: fact {}({:?}) derivable but Karr says unreachable",
                fact.pred, fact.pred, fact.args
            ));
        }
        for (row, rhs) in pi.space.equalities() {
            // Scale the rational row to integers by the common denominator.
            let d = row.iter().chain([rhs]).fold(BigInt::from(1), |acc, q| lcm(acc, q.denom().clone()));
            let int = |q: &BigRational| (q * BigRational::from_integer(d.clone())).to_integer().to_i128().unwrap();
            let lhs = row.iter().zip(&args).fold(LinExpr::zero(), |acc, (c, a)| acc.add(&a.scale(int(c))));
            let r = int(rhs);
            let eq = Formula::lin(lhs.add_constant(-r), Rel::Eq);
            match Lia::in_context(s, &fact.sorts, 10_000).valid(&fact.store, &eq) {
                Validity::Valid => {}
                Validity::Invalid(a) => return Err(format!("{}: equality {eq} fails at {a:?}", fact.pred)),
                Validity::Unknown(why) => return Err(format!("{}: undecided ({why})", fact.pred)),
            }
        }
    }
    Ok(facts.len())
}
