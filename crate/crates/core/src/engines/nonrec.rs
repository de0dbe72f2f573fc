//! Acyclic systems: refutation to full height, else interpretations computed
//! bottom-up by unfolding and projection.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::check::{check_model, CheckResult};
use super::lia::unify;
use super::refute::{bounded_refutation, Refutation};
use super::solve::Verdict;
use crate::horn::{default_params, CmpOp, Formula, HornSystem, Interp, LinExpr, Model, Rel, Sort, Subst, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NonrecError {
    #[error("system is recursive (cycle through {})", .0.join(", "))]
    Recursive(Vec<String>),
}

const CUBE_LIMIT: usize = 512;

/// Over-approximates `∃ (vars ∉ keep). f`; exact on the unit-coefficient
/// fragment the encoder produces.
pub fn project(f: &Formula, keep: &BTreeSet<String>, sorts: &BTreeMap<String, Sort>) -> Formula {
    let Some(cubes) = f.dnf(CUBE_LIMIT) else { return Formula::True };
    Formula::or(cubes.iter().map(|c| project_cube(c, keep, sorts)))
}

fn mentions_dropped(t: &Term, keep: &BTreeSet<String>) -> bool {
    let mut vs = Vec::new();
    t.collect_vars(&mut vs);
    vs.iter().any(|v| !keep.contains(v))
}

fn project_cube(lits: &[Formula], keep: &BTreeSet<String>, sorts: &BTreeMap<String, Sort>) -> Formula {
    let mut out = Vec::new();
    let mut lins: Vec<(LinExpr, Rel)> = Vec::new();
    let mut subst = Subst::new();
    let mut negs = Vec::new();
    let mut bools: BTreeMap<&str, bool> = BTreeMap::new();
    for l in lits {
        match l {
            Formula::True => {}
            Formula::False => return Formula::False,
            Formula::Lin(a) => lins.push((a.expr.clone(), a.rel)),
            Formula::Bool(v, p) => {
                if bools.insert(v, *p).is_some_and(|q| q != *p) {
                    return Formula::False;
                }
                if keep.contains(v) {
                    out.push(l.clone());
                }
            }
            Formula::TermEq(a, b, true) => {
                let mut eqs = Vec::new();
                if !unify(a, b, &mut subst, &mut eqs) {
                    return Formula::False;
                }
                lins.extend(eqs.into_iter().map(|e| (e, Rel::Eq)));
            }
            Formula::TermEq(..) => negs.push(l.clone()),
            Formula::And(_) | Formula::Or(_) => unreachable!("DNF cube"),
        }
    }
    let resolved = super::lia::resolve_all(&subst);
    for (v, t) in &resolved {
        if keep.contains(v) && !mentions_dropped(t, keep) {
            out.push(Formula::term_eq(Term::var_of(v.clone(), sorts.get(v).unwrap_or(&Sort::Int)), t.clone(), true));
        }
    }
    for n in negs {
        let n = n.subst(&resolved);
        let mut vs = Vec::new();
        n.collect_vars(&mut vs);
        if vs.iter().all(|v| keep.contains(v)) {
            out.push(n);
        }
    }
    let mut ints: BTreeSet<String> = BTreeSet::new();
    for (e, _) in &lins {
        ints.extend(e.vars().map(str::to_string));
    }
    for x in ints.into_iter().filter(|x| !keep.contains(x)) {
        lins = eliminate(lins, &x);
    }
    for (e, r) in lins {
        out.push(Formula::lin(e, r));
    }
    Formula::and(out)
}

/// Removes `x`: substitution through a unit equality when one exists, else
/// Fourier–Motzkin on the bounds (disequalities on `x` are dropped).
fn eliminate(lins: Vec<(LinExpr, Rel)>, x: &str) -> Vec<(LinExpr, Rel)> {
    if let Some(i) = lins.iter().position(|(e, r)| *r == Rel::Eq && e.coeff(x).abs() == 1) {
        let (e, _) = &lins[i];
        let c = e.coeff(x);
        // c·x + rest = 0  ⇒  x = -rest / c
        let rest = e.sub(&LinExpr::term(c, x));
        let by = rest.scale(-c);
        return lins
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, (e, r))| (e.substitute(x, &by), *r))
            .collect();
    }
    let mut les = Vec::new();
    let mut out = Vec::new();
    for (e, r) in lins {
        match (e.coeff(x), r) {
            (0, _) => out.push((e, r)),
            (_, Rel::Le) => les.push(e),
            (_, Rel::Eq) => {
                les.push(e.clone());
                les.push(e.scale(-1));
            }
            (_, Rel::Ne) => {}
        }
    }
    let (ups, lows): (Vec<_>, Vec<_>) = les.into_iter().partition(|e| e.coeff(x) > 0);
    for u in &ups {
        for l in &lows {
            let (cu, cl) = (u.coeff(x), -l.coeff(x));
            out.push((u.scale(cl).add(&l.scale(cu)), Rel::Le));
        }
    }
    out
}

fn interp_for(s: &HornSystem, model: &Model, pred: &str) -> Interp {
    let decl = s.pred(pred).expect("declared");
    let params = default_params(&decl.sorts);
    let keep: BTreeSet<String> = params.iter().map(|(p, _)| p.clone()).collect();
    let mut disjuncts = Vec::new();
    for (_, c) in s.defining_clauses(pred) {
        let c = c.rename(&|v: &str| format!("{v}~"));
        let mut sorts = c.sort_map();
        sorts.extend(params.iter().cloned());
        let mut parts = vec![c.constraint.clone()];
        for b in &c.body {
            match model.get(&b.pred).map(|i| i.apply(&b.args, s)) {
                Some(Ok(crate::horn::Applied::Formula(f))) => parts.push(f),
                _ => parts.push(Formula::True),
            }
        }
        let h = c.head.as_pred().expect("defining clause");
        for ((p, srt), t) in params.iter().zip(&h.args) {
            parts.push(match srt {
                Sort::Int => Formula::cmp(&LinExpr::var(p), CmpOp::Eq, t.as_lin().expect("Int argument")),
                Sort::Bool => Formula::iff(Formula::bool_var(p, true), Formula::of_bool_term(t)),
                _ => Formula::term_eq(Term::var_of(p.clone(), srt), t.clone(), true),
            });
        }
        disjuncts.push(project(&Formula::and(parts), &keep, &sorts));
    }
    Interp::single(params, Formula::or(disjuncts))
}

/// Decides an acyclic system. UNSAT comes with a replayable derivation; SAT
/// with the least model (projected) after it passes `check_model`.
pub fn solve_nonrecursive(s: &HornSystem) -> Result<Verdict, NonrecError> {
    let Some(order) = s.topological_order() else {
        return Err(NonrecError::Recursive(s.recursive_preds().into_iter().collect()));
    };
    let exhausted = match bounded_refutation(s, s.preds.len()) {
        Refutation::Unsat(d) => return Ok(Verdict::Unsat(d)),
        Refutation::NoneFound { exhausted } => exhausted,
    };
    let mut model = Model::new();
    for p in &order {
        if s.pred(p).is_some() {
            let i = interp_for(s, &model, p);
            model.insert(p.clone(), i);
        }
    }
    Ok(match check_model(s, &model) {
        Ok(CheckResult::Valid) => Verdict::Sat(model),
        Ok(other) if exhausted => Verdict::Unknown(format!("refutation budget exhausted; unfolded model: {other}")),
        Ok(other) => Verdict::Unknown(format!("unfolded model not certified: {other}")),
        Err(e) => Verdict::Unknown(format!("unfolded model rejected: {e}")),
    })
}
