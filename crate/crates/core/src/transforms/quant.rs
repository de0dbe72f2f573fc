use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::TransformError;
use crate::horn::{Clause, Head, HornSystem, LinExpr, PredApp, Sort, Step, Subst, Term};

/// Position of an atom within a clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomPos {
    Body(usize),
    Head,
}

impl fmt::Display for AtomPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomPos::Body(i) => write!(f, "body {i}"),
            AtomPos::Head => write!(f, "head"),
        }
    }
}

/// Terms for the quantified tuple of each abstracted atom, keyed by clause
/// index and atom position. Variables named `?p` are fresh parameters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InstantiationTemplate {
    pub entries: BTreeMap<(usize, AtomPos), Vec<LinExpr>>,
}

impl InstantiationTemplate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, clause: usize, pos: AtomPos, terms: Vec<LinExpr>) {
        self.entries.insert((clause, pos), terms);
    }
}

/// Adds `k` quantified Int positions in front of every atom of each target.
pub fn quantified_abstraction(s: &HornSystem, k: usize, targets: &[&str]) -> Result<HornSystem, TransformError> {
    if targets.is_empty() {
        return Err(TransformError::Precondition("no target predicates".into()));
    }
    for t in targets {
        if s.pred(t).is_none() {
            return Err(TransformError::UnknownPredicate(t.to_string()));
        }
    }
    if k == 0 {
        return Ok(s.clone());
    }
    let mut out = s.clone();
    for p in &mut out.preds {
        if targets.contains(&p.name.as_str()) {
            let mut sorts = vec![Sort::Int; k];
            sorts.extend(p.sorts.iter().cloned());
            p.sorts = sorts;
        }
    }
    for c in &mut out.clauses {
        let taken: BTreeSet<String> = c.vars.iter().map(|(v, _)| v.clone()).collect();
        let zs: Vec<String> = (1..=k)
            .map(|i| {
                let mut z = format!("z{i}");
                while taken.contains(&z) {
                    z.push('\'');
                }
                z
            })
            .collect();
        let wrap = |a: &PredApp| -> PredApp {
            if !targets.contains(&a.pred.as_str()) {
                return a.clone();
            }
            let mut args: Vec<Term> = zs.iter().map(|z| Term::int_var(z.clone())).collect();
            args.extend(a.args.iter().cloned());
            PredApp { pred: a.pred.clone(), args, bound: zs.clone() }
        };
        c.body = c.body.iter().map(wrap).collect();
        if let Head::Pred(h) = &c.head {
            c.head = Head::Pred(wrap(h));
        }
    }
    out.record(Step::note("quantified-abstraction", format!("k={k} over {}", targets.join(", "))));
    Ok(out)
}

fn instantiate_atom(
    a: &PredApp,
    clause: usize,
    pos: AtomPos,
    t: &InstantiationTemplate,
    params: &mut BTreeMap<String, String>,
    c: &Clause,
) -> Result<PredApp, TransformError> {
    if a.bound.is_empty() {
        return Ok(a.clone());
    }
    let terms = t.entries.get(&(clause, pos)).ok_or(TransformError::MissingTemplate { clause, pos })?;
    if terms.len() != a.bound.len() {
        return Err(TransformError::TemplateArity { clause, pos, expected: a.bound.len(), found: terms.len() });
    }
    let mut s = Subst::new();
    for (b, e) in a.bound.iter().zip(terms) {
        let mut map = BTreeMap::new();
        for v in e.vars() {
            if let Some(p) = v.strip_prefix('?') {
                let name = params.entry(v.to_string()).or_insert_with(|| {
                    let mut n = p.to_string();
                    while c.vars.iter().any(|(x, _)| *x == n) {
                        n.push('\'');
                    }
                    n
                });
                map.insert(v.to_string(), name.clone());
            } else if c.sort_of(v) != Some(&Sort::Int) {
                return Err(TransformError::Precondition(format!(
                    "template for clause {clause} {pos} mentions {v}, which is not an Int variable of the clause"
                )));
            }
        }
        let e = e.rename(&|v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_string()));
        s.insert(b.clone(), Term::Int(e));
    }
    let plain = PredApp { pred: a.pred.clone(), args: a.args.clone(), bound: Vec::new() };
    Ok(plain.subst(&s))
}

/// Replaces each quantified atom by its template instance.
pub fn instantiate(s: &HornSystem, t: &InstantiationTemplate) -> Result<HornSystem, TransformError> {
    let mut out = s.clone();
    for (i, c) in s.clauses.iter().enumerate() {
        let mut params = BTreeMap::new();
        let body = c
            .body
            .iter()
            .enumerate()
            .map(|(j, a)| instantiate_atom(a, i, AtomPos::Body(j), t, &mut params, c))
            .collect::<Result<Vec<_>, _>>()?;
        let head = match &c.head {
            Head::Pred(h) => Head::Pred(instantiate_atom(h, i, AtomPos::Head, t, &mut params, c)?),
            Head::False => Head::False,
        };
        let mut extra: BTreeMap<String, Sort> = params.values().map(|p| (p.clone(), Sort::Int)).collect();
        extra.extend(c.sort_map());
        out.clauses[i] = Clause::build(&extra, body, c.constraint.clone(), head);
    }
    out.record(Step::note(
        "instantiate",
        "quantified atoms instantiated; a model of the result is a model of the quantified system only if the templates are exhaustive",
    ));
    Ok(out)
}
