use std::collections::BTreeMap;

use crate::horn::{Clause, Head, HornSystem, PredApp, Step, Term};

fn occurrences(c: &Clause) -> BTreeMap<String, usize> {
    let mut n = BTreeMap::new();
    let mut count = |t: &Term| {
        let mut vs = Vec::new();
        t.collect_vars(&mut vs);
        // collect_vars dedups; count repeated occurrences inside one term too
        for v in vs {
            *n.entry(v).or_insert(0) += 1;
        }
    };
    for a in c.atoms() {
        for t in &a.args {
            count(t);
        }
    }
    for v in c.constraint.vars() {
        *n.entry(v).or_insert(0) += 2;
    }
    n
}

fn drop_positions(a: &PredApp, positions: &[usize]) -> PredApp {
    PredApp {
        pred: a.pred.clone(),
        args: a.args.iter().enumerate().filter(|(i, _)| !positions.contains(i)).map(|(_, t)| t.clone()).collect(),
        bound: a.bound.clone(),
    }
}

/// Drops argument positions that hold, in every atom of the predicate, a
/// variable occurring nowhere else in its clause.
pub fn remove_unused_args(s: &HornSystem) -> HornSystem {
    let mut dead: BTreeMap<String, Vec<usize>> =
        s.preds.iter().map(|p| (p.name.clone(), (0..p.sorts.len()).collect())).collect();
    for c in &s.clauses {
        let occ = occurrences(c);
        for a in c.atoms() {
            let Some(d) = dead.get_mut(&a.pred) else { continue };
            d.retain(|&i| match a.args[i].as_var() {
                Some(v) if !a.bound.iter().any(|b| b == v) => occ.get(v) == Some(&1),
                _ => false,
            });
        }
    }
    dead.retain(|_, d| !d.is_empty());
    if dead.is_empty() {
        return s.clone();
    }
    let mut out = s.clone();
    for c in &mut out.clauses {
        let sorts = c.sort_map();
        c.body = c.body.iter().map(|a| dead.get(&a.pred).map_or_else(|| a.clone(), |d| drop_positions(a, d))).collect();
        if let Head::Pred(h) = &c.head {
            if let Some(d) = dead.get(&h.pred) {
                c.head = Head::Pred(drop_positions(h, d));
            }
        }
        c.refresh_vars(&sorts);
    }
    for p in &mut out.preds {
        if let Some(d) = dead.get(&p.name) {
            let old = p.sorts.clone();
            p.sorts = old.iter().enumerate().filter(|(i, _)| !d.contains(i)).map(|(_, s)| s.clone()).collect();
            out.provenance.push(Step::DropArgs { pred: p.name.clone(), sorts: old, positions: d.clone() });
        }
    }
    out
}
