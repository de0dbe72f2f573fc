use std::collections::BTreeMap;

use crate::engines::lia::{resolve_all, unify};
use crate::horn::{Clause, CmpOp, Formula, Head, HornSystem, PredApp, Rel, Sort, Subst, Term};

/// Copy of `c` whose variables avoid every name in `avoid` (a prime is
/// appended until free).
pub fn rename_apart(c: &Clause, avoid: &[(String, Sort)]) -> Clause {
    let taken: Vec<&str> =
        avoid.iter().map(|(v, _)| v.as_str()).chain(c.vars.iter().map(|(v, _)| v.as_str())).collect();
    let mut map = BTreeMap::new();
    for (v, _) in &c.vars {
        if avoid.iter().any(|(a, _)| a == v) {
            let mut n = format!("{v}'");
            while taken.contains(&n.as_str()) || map.values().any(|x: &String| *x == n) {
                n.push('\'');
            }
            map.insert(v.clone(), n);
        }
    }
    c.rename(&|v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_string()))
}

/// Constraint equating `a` and `b`, or `None` if their constructors clash.
/// ADT equations are solved into `subst`.
fn equate(a: &Term, b: &Term, sort: &Sort, subst: &mut Subst, out: &mut Vec<Formula>) -> bool {
    match sort {
        Sort::Int => {
            out.push(Formula::cmp(a.as_lin().unwrap(), CmpOp::Eq, b.as_lin().unwrap()));
            true
        }
        Sort::Bool => {
            out.push(Formula::iff(Formula::of_bool_term(a), Formula::of_bool_term(b)));
            true
        }
        _ => {
            let mut eqs = Vec::new();
            if !unify(a, b, subst, &mut eqs) {
                return false;
            }
            out.extend(eqs.into_iter().map(|e| Formula::lin(e, Rel::Eq)));
            true
        }
    }
}

/// Resolves body atom `i` of `c` against the head of `def`. `None` when the
/// head does not unify.
pub fn resolve(s: &HornSystem, c: &Clause, i: usize, def: &Clause) -> Option<Clause> {
    let def = rename_apart(def, &c.vars);
    let Head::Pred(h) = &def.head else { return None };
    let atom = &c.body[i];
    let decl = s.pred(&atom.pred)?;
    let mut subst = Subst::new();
    let mut cons = vec![c.constraint.clone(), def.constraint.clone()];
    for ((a, b), srt) in atom.args.iter().zip(&h.args).zip(&decl.sorts) {
        if !equate(a, b, srt, &mut subst, &mut cons) {
            return None;
        }
    }
    let subst = resolve_all(&subst);
    let mut body: Vec<PredApp> = c.body[..i].to_vec();
    body.extend(def.body.iter().cloned());
    body.extend(c.body[i + 1..].iter().cloned());
    let mut sorts = c.sort_map();
    sorts.extend(def.sort_map());
    let merged = Clause::build(&sorts, body, Formula::and(cons), c.head.clone());
    let out = merged.subst_unchecked(&subst, &sorts);
    if out.constraint == Formula::False {
        return None;
    }
    Some(simplify_clause(&out, &|v: &str| v.ends_with('\'')))
}

/// Eliminates variables fixed by top-level unit equalities, preferring
/// variables for which `prefer` holds, then strips primes where no clash
/// results.
pub fn simplify_clause(c: &Clause, prefer: &dyn Fn(&str) -> bool) -> Clause {
    let mut c = c.clone();
    loop {
        let conj = c.constraint.conjuncts();
        let mut pick: Option<(usize, String, Term)> = None;
        for (k, f) in conj.iter().enumerate() {
            let cand = match f {
                Formula::Lin(a) if a.rel == Rel::Eq => a
                    .expr
                    .coeffs()
                    .filter(|(_, co)| co.abs() == 1)
                    .map(|(v, co)| {
                        let rest = a.expr.sub(&crate::horn::LinExpr::term(co, v));
                        (v.to_string(), Term::Int(rest.scale(-co)))
                    })
                    .max_by_key(|(v, _)| prefer(v)),
                Formula::TermEq(Term::Var(v), t, true) | Formula::TermEq(t, Term::Var(v), true) => {
                    let mut vs = Vec::new();
                    t.collect_vars(&mut vs);
                    (!vs.contains(v)).then(|| (v.clone(), t.clone()))
                }
                _ => None,
            };
            if let Some((v, t)) = cand {
                let better = match &pick {
                    None => true,
                    Some((_, pv, _)) => prefer(&v) && !prefer(pv),
                };
                if better {
                    pick = Some((k, v, t));
                }
            }
        }
        let Some((k, v, t)) = pick else { break };
        let rest: Vec<Formula> = conj.into_iter().enumerate().filter(|(j, _)| *j != k).map(|(_, f)| f).collect();
        c.constraint = Formula::and(rest);
        let mut s = Subst::new();
        s.insert(v, t);
        let sorts = c.sort_map();
        c = c.subst_unchecked(&s, &sorts);
    }
    strip_primes(&c)
}

fn strip_primes(c: &Clause) -> Clause {
    let names: Vec<String> = c.vars.iter().map(|(v, _)| v.clone()).collect();
    let mut map = BTreeMap::new();
    let mut used: Vec<String> = names.iter().filter(|v| !v.ends_with('\'')).cloned().collect();
    for v in names.iter().filter(|v| v.ends_with('\'')) {
        let base = v.trim_end_matches('\'').to_string();
        if !used.contains(&base) {
            used.push(base.clone());
            map.insert(v.clone(), base);
        }
    }
    c.rename(&|v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_string()))
}
