//! Structural comparison of clauses and systems up to variable renaming.

use std::collections::BTreeMap;

use super::clause::{Clause, Head, PredApp};
use super::formula::Formula;
use super::system::HornSystem;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn formula_key(f: &Formula) -> String {
    match f {
        Formula::And(parts) => {
            let mut keys: Vec<String> = parts.iter().map(formula_key).collect();
            keys.sort();
            format!("(and {})", keys.join(" "))
        }
        Formula::Or(parts) => {
            let mut keys: Vec<String> = parts.iter().map(formula_key).collect();
            keys.sort();
            format!("(or {})", keys.join(" "))
        }
        other => other.to_string(),
    }
}

fn rename_with(c: &Clause, order: &[String]) -> Clause {
    let map: BTreeMap<&str, String> = order.iter().enumerate().map(|(i, v)| (v.as_str(), format!("_v{i}"))).collect();
    c.rename(&|v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_string()))
}

fn key_for(c: &Clause, body_order: &[usize], rest_order: &[usize]) -> String {
    let mut order = Vec::new();
    for &i in body_order {
        c.body[i].collect_vars(&mut order);
    }
    if let Head::Pred(h) = &c.head {
        h.collect_vars(&mut order);
    }
    let rest: Vec<String> = c.free_vars().into_iter().filter(|v| !order.contains(v)).collect();
    for &i in rest_order {
        order.push(rest[i].clone());
    }
    let r = rename_with(c, &order);
    let body: Vec<String> = body_order.iter().map(|&i| r.body[i].to_string()).collect();
    let head = match &r.head {
        Head::Pred(h) => h.to_string(),
        Head::False => "false".into(),
    };
    let mut sorts: Vec<String> = r.vars.iter().map(|(v, s)| format!("{v}:{s}")).collect();
    sorts.sort();
    format!("{} | {} -> {} | {}", body.join(" & "), formula_key(&r.constraint), head, sorts.join(","))
}

/// Canonical text of a clause, invariant under variable renaming, body-atom
/// order, and conjunct order.
pub fn clause_key(c: &Clause) -> String {
    let rest_count = {
        let mut order = Vec::new();
        for b in &c.body {
            b.collect_vars(&mut order);
        }
        if let Head::Pred(h) = &c.head {
            h.collect_vars(&mut order);
        }
        c.free_vars().into_iter().filter(|v| !order.contains(v)).count()
    };
    let body_perms = if c.body.len() <= 5 { permutations(c.body.len()) } else { vec![(0..c.body.len()).collect()] };
    let rest_perms = if rest_count <= 4 { permutations(rest_count) } else { vec![(0..rest_count).collect()] };
    let mut best: Option<String> = None;
    for bp in &body_perms {
        for rp in &rest_perms {
            let k = key_for(c, bp, rp);
            if best.as_ref().is_none_or(|b| k < *b) {
                best = Some(k);
            }
        }
    }
    best.unwrap_or_default()
}

/// Renames predicates according to `map` (unlisted names unchanged).
pub fn rename_preds(sys: &HornSystem, map: &BTreeMap<String, String>) -> HornSystem {
    let f = |p: &str| map.get(p).cloned().unwrap_or_else(|| p.to_string());
    let ren = |a: &PredApp| PredApp { pred: f(&a.pred), ..a.clone() };
    let mut out = sys.clone();
    for p in &mut out.preds {
        p.name = f(&p.name);
    }
    for c in &mut out.clauses {
        c.body = c.body.iter().map(ren).collect();
        if let Head::Pred(h) = &c.head {
            c.head = Head::Pred(ren(h));
        }
    }
    out
}

/// Sorted clause keys; equal lists mean equal clause multisets up to renaming.
pub fn system_keys(sys: &HornSystem) -> Vec<String> {
    let mut keys: Vec<String> = sys.clauses.iter().map(clause_key).collect();
    keys.sort();
    keys
}

/// Clause multisets equal up to variable renaming, after renaming the
/// predicates of `a` by `pred_map`.
pub fn equivalent_up_to_renaming(a: &HornSystem, b: &HornSystem, pred_map: &BTreeMap<String, String>) -> bool {
    system_keys(&rename_preds(a, pred_map)) == system_keys(b)
}
