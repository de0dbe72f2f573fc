use std::collections::BTreeSet;

use super::util::resolve;
use super::TransformError;
use crate::horn::canon::clause_key;
use crate::horn::{Clause, Formula, Head, HornSystem, Step};

fn dedupe(s: &mut HornSystem) -> usize {
    let mut seen = BTreeSet::new();
    let before = s.clauses.len();
    s.clauses.retain(|c| seen.insert(clause_key(c)));
    before - s.clauses.len()
}

/// Replaces every body occurrence of `p` by the body of its single defining
/// clause and drops that clause.
fn unfold(s: &HornSystem, p: &str) -> HornSystem {
    let (def_idx, def) = s.defining_clauses(p).next().expect("single definition");
    let def = def.clone();
    let mut out = s.clone();
    out.clauses = Vec::new();
    for (i, c) in s.clauses.iter().enumerate() {
        if i == def_idx {
            continue;
        }
        let mut cur = Some(c.clone());
        while let Some(k) = cur.as_ref().and_then(|c| c.body.iter().position(|a| a.pred == p)) {
            cur = resolve(s, cur.as_ref().unwrap(), k, &def);
        }
        out.clauses.extend(cur);
    }
    out
}

/// Unfolds every predicate other than those in `keep` that is used in some
/// body and defined by exactly one clause not mentioning it in its body.
pub fn inline_single_definitions(s: &HornSystem, keep: &[&str]) -> HornSystem {
    let mut s = s.clone();
    loop {
        let cand = s.preds.iter().map(|p| p.name.clone()).find(|p| {
            !keep.contains(&p.as_str())
                && s.defining_clauses(p).count() == 1
                && s.clauses.iter().any(|c| c.body.iter().any(|a| &a.pred == p))
                && s.defining_clauses(p).all(|(_, c)| !c.body.iter().any(|a| &a.pred == p))
        });
        let Some(p) = cand else { break };
        s = unfold(&s, &p);
        s.record(Step::note("inline", format!("unfolded {p}")));
        s.prune_declarations();
    }
    s
}

/// Merges `from` into `into` (renaming every occurrence), then unfolds the
/// remaining single-definition predicates and drops duplicate clauses.
pub fn inline_predicate(s: &HornSystem, from: &str, into: &str) -> Result<HornSystem, TransformError> {
    let a = s.pred(from).ok_or_else(|| TransformError::UnknownPredicate(from.into()))?;
    let b = s.pred(into).ok_or_else(|| TransformError::UnknownPredicate(into.into()))?;
    if a.sorts != b.sorts {
        return Err(TransformError::SignatureMismatch { from: from.into(), into: into.into() });
    }
    if from == into {
        return Ok(s.clone());
    }
    let map = [(from.to_string(), into.to_string())].into();
    let mut pruned = s.clone();
    pruned.preds.retain(|p| p.name != from);
    let mut out = crate::horn::canon::rename_preds(&pruned, &map);
    out.record(Step::note("merge", format!("{from} into {into}")));
    let mut out = inline_single_definitions(&out, &[into]);
    dedupe(&mut out);
    Ok(out)
}

fn is_tautology(c: &Clause) -> bool {
    matches!(&c.head, Head::Pred(h) if c.body.iter().any(|b| b == h))
}

/// Drops clauses whose head also occurs verbatim in the body.
pub fn remove_tautologies(s: &HornSystem) -> HornSystem {
    let mut out = s.clone();
    out.clauses.retain(|c| !is_tautology(c));
    let n = s.clauses.len() - out.clauses.len();
    if n > 0 {
        out.record(Step::note("remove-tautologies", format!("{n} removed")));
    }
    out
}

/// `a` subsumes `b`: same head, and `a`'s body atoms and constraint
/// conjuncts are among `b`'s.
fn subsumes(a: &Clause, b: &Clause) -> bool {
    if a.head != b.head || a.body.len() > b.body.len() {
        return false;
    }
    let mut pool = b.body.clone();
    for atom in &a.body {
        match pool.iter().position(|x| x == atom) {
            Some(i) => {
                pool.remove(i);
            }
            None => return false,
        }
    }
    let bc = b.constraint.conjuncts();
    a.constraint.conjuncts().iter().all(|f| *f == Formula::True || bc.contains(f))
}

/// Tautologies, duplicates (up to variable renaming) and syntactically
/// subsumed clauses. Returns the kept original indices alongside.
pub fn remove_redundant_indexed(s: &HornSystem) -> (HornSystem, Vec<usize>) {
    let mut keep: Vec<usize> = (0..s.clauses.len()).filter(|&i| !is_tautology(&s.clauses[i])).collect();
    let mut seen = BTreeSet::new();
    keep.retain(|&i| seen.insert(clause_key(&s.clauses[i])));
    let snapshot = keep.clone();
    keep.retain(|&i| {
        !snapshot.iter().any(|&j| {
            j != i && subsumes(&s.clauses[j], &s.clauses[i]) && !(subsumes(&s.clauses[i], &s.clauses[j]) && i < j)
        })
    });
    let mut out = s.clone();
    out.clauses = keep.iter().map(|&i| s.clauses[i].clone()).collect();
    let n = s.clauses.len() - out.clauses.len();
    if n > 0 {
        out.record(Step::note("remove-redundant", format!("{n} removed")));
    }
    (out, keep)
}

pub fn remove_redundant(s: &HornSystem) -> HornSystem {
    remove_redundant_indexed(s).0
}

/// Resolves away the single clause producing `pivot` in its head against
/// every body atom carrying `pivot`, then removes the parents.
pub fn eliminate_by_resolution(s: &HornSystem, pivot: &str) -> Result<HornSystem, TransformError> {
    if s.ctor(pivot).is_none() {
        return Err(TransformError::UnknownConstructor(pivot.into()));
    }
    let bad = |msg: String| Err(TransformError::Precondition(msg));
    let producers: Vec<usize> =
        (0..s.clauses.len()).filter(|&i| s.clauses[i].head.as_pred().is_some_and(|h| h.mentions_ctor(pivot))).collect();
    if producers.len() != 1 {
        return bad(format!("{} clauses build {pivot} in their head, expected exactly one", producers.len()));
    }
    let p = producers[0];
    let producer = &s.clauses[p];
    if producer.body.iter().any(|a| a.mentions_ctor(pivot)) {
        return bad(format!("clause {p} both consumes and produces {pivot}"));
    }
    let mut consumers = 0;
    for (i, c) in s.clauses.iter().enumerate() {
        if c.constraint.mentions_ctor(pivot) {
            return bad(format!("{pivot} occurs in the constraint of clause {i}"));
        }
        if c.body.iter().any(|a| a.mentions_ctor(pivot)) {
            consumers += 1;
        }
    }
    if consumers == 0 {
        return bad(format!("no clause consumes {pivot}"));
    }
    let mut out = s.clone();
    out.clauses = Vec::new();
    for (i, c) in s.clauses.iter().enumerate() {
        if i == p {
            continue;
        }
        let mut cur = Some(c.clone());
        while let Some(k) = cur.as_ref().and_then(|c| c.body.iter().position(|a| a.mentions_ctor(pivot))) {
            cur = resolve(s, cur.as_ref().unwrap(), k, producer);
        }
        out.clauses.extend(cur);
    }
    if out.clauses.iter().any(|c| c.mentions_ctor(pivot)) {
        return bad(format!("{pivot} survives resolution"));
    }
    out.record(Step::note("resolve", format!("eliminated {pivot}")));
    Ok(out)
}
