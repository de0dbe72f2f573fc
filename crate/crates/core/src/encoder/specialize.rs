use std::collections::{BTreeMap, BTreeSet};

use super::{EncodingOptions, Mode};
use crate::horn::{Clause, Formula, Head, HornSystem, PredApp, PredDecl, Sort, Step, Subst, Term};

/// Simplifies a canonical system as far as `opts` allow. The returned system's
/// provenance extends the input's with one back-translatable step per change.
pub fn specialize(s: &HornSystem, opts: &EncodingOptions) -> HornSystem {
    let mut sys = s.clone();
    if opts.mode == Mode::Canonical {
        return sys;
    }
    let split = if opts.elide_ok { split_ok_flags(&mut sys) } else { Vec::new() };
    remove_unproductive(&mut sys);
    restrict_to_goal_cone(&mut sys);
    for (pred, ok, err) in split {
        let ok_alive = sys.pred(&ok).is_some();
        let err_alive = sys.pred(&err).is_some();
        if ok_alive != err_alive {
            let from = if ok_alive { ok } else { err };
            rename_pred(&mut sys, &from, &pred);
            sys.record(Step::Rename { from, to: pred });
        }
    }
    if opts.unfold_singleton_closures {
        while unfold_singleton_closure(&mut sys) {}
    }
    loop {
        let a = eliminate_alias(&mut sys);
        let c = elide_constant_position(&mut sys);
        if !a && !c {
            break;
        }
    }
    if opts.drop_unused_args {
        drop_dead_positions(&mut sys);
    }
    sys.prune_declarations();
    sys
}

fn rename_pred(sys: &mut HornSystem, from: &str, to: &str) {
    let fix = |a: &mut PredApp| {
        if a.pred == from {
            a.pred = to.to_string();
        }
    };
    for c in &mut sys.clauses {
        c.body.iter_mut().for_each(fix);
        if let Head::Pred(h) = &mut c.head {
            fix(h);
        }
    }
    if let Some(p) = sys.pred_mut(from) {
        p.name = to.to_string();
    }
}

/// Replaces every `p(args, ok)` with a success flag by `p_ok(args)` or
/// `p_err(args)`, enumerating the Bool values of flag variables per clause.
fn split_ok_flags(sys: &mut HornSystem) -> Vec<(String, String, String)> {
    let flagged: BTreeMap<String, PredDecl> =
        sys.preds.iter().filter(|p| p.ok_flag).map(|p| (p.name.clone(), p.clone())).collect();
    if flagged.is_empty() {
        return Vec::new();
    }
    let variant = |p: &str, ok: bool| format!("{p}_{}", if ok { "ok" } else { "err" });
    let mut clauses = Vec::new();
    for c in &sys.clauses {
        let mut flag_vars: Vec<String> = Vec::new();
        for a in c.atoms().filter(|a| flagged.contains_key(&a.pred)) {
            if let Some(Term::Var(v)) = a.args.last() {
                if !flag_vars.contains(v) {
                    flag_vars.push(v.clone());
                }
            }
        }
        for bits in 0..(1u64 << flag_vars.len()) {
            let sigma: Subst =
                flag_vars.iter().enumerate().map(|(i, v)| (v.clone(), Term::Bool(bits >> i & 1 == 1))).collect();
            let constraint = c.constraint.subst(&sigma);
            if constraint == Formula::False {
                continue;
            }
            let fix = |a: &PredApp| -> PredApp {
                let a = a.subst(&sigma);
                if !flagged.contains_key(&a.pred) {
                    return a;
                }
                let mut args = a.args.clone();
                let ok = match args.pop() {
                    Some(Term::Bool(b)) => b,
                    other => unreachable!("flag not decided: {other:?}"),
                };
                PredApp { pred: variant(&a.pred, ok), args, bound: a.bound.clone() }
            };
            let mut out = Clause {
                vars: c.vars.clone(),
                body: c.body.iter().map(fix).collect(),
                constraint,
                head: match &c.head {
                    Head::Pred(h) => Head::Pred(fix(h)),
                    Head::False => Head::False,
                },
            };
            out.refresh_vars(&BTreeMap::new());
            clauses.push(out);
        }
    }
    sys.clauses = clauses;
    let mut out = Vec::new();
    let mut preds = Vec::new();
    for p in &sys.preds {
        if p.ok_flag {
            let sorts = p.sorts[..p.sorts.len() - 1].to_vec();
            let (ok, err) = (variant(&p.name, true), variant(&p.name, false));
            preds.push(PredDecl::new(ok.clone(), sorts.clone()));
            preds.push(PredDecl::new(err.clone(), sorts));
            out.push((p.name.clone(), ok, err));
        } else {
            preds.push(p.clone());
        }
    }
    for (pred, ok, err) in &out {
        let sorts = flagged[pred].sorts.clone();
        sys.record(Step::OkSplit { pred: pred.clone(), sorts, ok_pred: ok.clone(), err_pred: err.clone() });
    }
    sys.preds = preds;
    out
}

fn remove_preds(sys: &mut HornSystem, dead: &BTreeSet<String>, value: bool) {
    if dead.is_empty() {
        return;
    }
    sys.clauses.retain(|c| !c.atoms().any(|a| dead.contains(&a.pred)));
    for p in sys.preds.iter().filter(|p| dead.contains(&p.name)) {
        sys.provenance.push(Step::Removed { pred: p.name.clone(), sorts: p.sorts.clone(), value });
    }
    sys.preds.retain(|p| !dead.contains(&p.name));
}

/// Predicates with no finite derivation are empty; drop them and every clause using them.
fn remove_unproductive(sys: &mut HornSystem) {
    let mut productive = BTreeSet::new();
    loop {
        let before = productive.len();
        for c in &sys.clauses {
            if let Some(h) = c.head.pred_name() {
                if c.constraint != Formula::False && c.body.iter().all(|b| productive.contains(&b.pred)) {
                    productive.insert(h.to_string());
                }
            }
        }
        if productive.len() == before {
            break;
        }
    }
    let dead: BTreeSet<String> = sys.preds.iter().map(|p| p.name.clone()).filter(|p| !productive.contains(p)).collect();
    remove_preds(sys, &dead, false);
}

/// Predicates no goal depends on can be interpreted as true.
fn restrict_to_goal_cone(sys: &mut HornSystem) {
    let deps = sys.dependencies();
    let mut cone = BTreeSet::new();
    let mut stack: Vec<String> = sys.goals().flat_map(|(_, c)| c.body.iter().map(|b| b.pred.clone())).collect();
    while let Some(p) = stack.pop() {
        if cone.insert(p.clone()) {
            if let Some(ds) = deps.get(&p) {
                stack.extend(ds.iter().cloned());
            }
        }
    }
    let dead: BTreeSet<String> = sys.preds.iter().map(|p| p.name.clone()).filter(|p| !cone.contains(p)).collect();
    remove_preds(sys, &dead, true);
}

/// Unfolds a datatype with a single non-recursive constructor that no other
/// constructor mentions: each argument of that sort becomes the
/// constructor's fields.
fn unfold_singleton_closure(sys: &mut HornSystem) -> bool {
    let candidate = sys.datatypes.iter().find(|d| {
        d.ctors.len() == 1
            && !d.is_recursive_ctor(&d.ctors[0])
            && !sys
                .datatypes
                .iter()
                .any(|e| e.name != d.name && e.ctors.iter().any(|c| c.fields.contains(&Sort::Adt(d.name.clone()))))
    });
    let Some(d) = candidate.cloned() else { return false };
    let ctor = d.ctors[0].clone();
    let adt = Sort::Adt(d.name.clone());

    let mut clauses = Vec::new();
    for c in &sys.clauses {
        let mut sorts: BTreeMap<String, Sort> = c.sort_map();
        let mut sigma = Subst::new();
        for (v, s) in &c.vars {
            if *s != adt {
                continue;
            }
            sorts.remove(v);
            let fields: Vec<Term> = if ctor.fields.len() == 1 {
                vec![Term::var_of(v.clone(), &ctor.fields[0])]
            } else {
                (0..ctor.fields.len()).map(|k| Term::var_of(format!("{v}_{k}"), &ctor.fields[k])).collect()
            };
            for (t, s) in fields.iter().zip(&ctor.fields) {
                sorts.insert(t.as_var().unwrap().to_string(), s.clone());
            }
            sigma.insert(v.clone(), Term::Ctor(ctor.name.clone(), fields));
        }
        let flatten = |a: &PredApp| -> PredApp {
            let a = a.subst(&sigma);
            let decl = sys.pred(&a.pred).unwrap();
            let mut args = Vec::new();
            for (t, s) in a.args.iter().zip(&decl.sorts) {
                match t {
                    Term::Ctor(name, fs) if *s == adt && *name == ctor.name => args.extend(fs.iter().cloned()),
                    other => args.push(other.clone()),
                }
            }
            PredApp { pred: a.pred.clone(), args, bound: a.bound.clone() }
        };
        let body = c.body.iter().map(flatten).collect();
        let head = match &c.head {
            Head::Pred(h) => Head::Pred(flatten(h)),
            Head::False => Head::False,
        };
        clauses.push(Clause::build(&sorts, body, c.constraint.subst(&sigma), head));
    }
    sys.clauses = clauses;
    let mut affected = Vec::new();
    for p in &mut sys.preds {
        if p.sorts.contains(&adt) {
            affected.push((p.name.clone(), p.sorts.clone()));
            p.sorts =
                p.sorts.iter().flat_map(|s| if *s == adt { ctor.fields.clone() } else { vec![s.clone()] }).collect();
        }
    }
    sys.datatypes.retain(|x| x.name != d.name);
    sys.record(Step::ClosureUnfold { datatype: d.name, ctor: ctor.name, fields: ctor.fields, preds: affected });
    true
}

/// `q` defined only by `p(v₁…vₙ) → q(w₁…wₙ)` with `w` a permutation of the
/// distinct variables `v`: replace `q` by `p` everywhere.
fn eliminate_alias(sys: &mut HornSystem) -> bool {
    for decl in &sys.preds {
        let q = &decl.name;
        let defs: Vec<&Clause> = sys.defining_clauses(q).map(|(_, c)| c).collect();
        let [def] = defs.as_slice() else { continue };
        let [body] = def.body.as_slice() else { continue };
        let Head::Pred(head) = &def.head else { continue };
        if def.constraint != Formula::True || body.pred == *q || body.is_quantified() || head.is_quantified() {
            continue;
        }
        let vars = |a: &PredApp| -> Option<Vec<String>> {
            let vs: Option<Vec<String>> = a.args.iter().map(|t| t.as_var().map(str::to_string)).collect();
            let vs = vs?;
            let distinct: BTreeSet<&String> = vs.iter().collect();
            (distinct.len() == vs.len()).then_some(vs)
        };
        let (Some(bv), Some(hv)) = (vars(body), vars(head)) else { continue };
        if bv.len() != hv.len() {
            continue;
        }
        let perm: Option<Vec<usize>> = bv.iter().map(|v| hv.iter().position(|w| w == v)).collect();
        let Some(perm) = perm else { continue };

        let (q, p, sorts) = (q.clone(), body.pred.clone(), decl.sorts.clone());
        let replace = |a: &PredApp| -> PredApp {
            if a.pred != q {
                return a.clone();
            }
            PredApp { pred: p.clone(), args: perm.iter().map(|&j| a.args[j].clone()).collect(), bound: a.bound.clone() }
        };
        sys.clauses.retain(|c| c.head.pred_name() != Some(q.as_str()));
        for c in &mut sys.clauses {
            c.body = c.body.iter().map(replace).collect();
        }
        sys.preds.retain(|d| d.name != q);
        sys.record(Step::Alias { pred: q, sorts, target: p, perm });
        return true;
    }
    false
}

fn equality(t: &Term, value: &Term) -> Formula {
    match (t, value) {
        (_, Term::Unit) => Formula::True,
        (Term::Int(a), Term::Int(b)) => Formula::cmp(a, crate::horn::CmpOp::Eq, b),
        (x, Term::Bool(b)) => Formula::iff(Formula::of_bool_term(x), Formula::from_bool(*b)),
        (x, v) => Formula::term_eq(x.clone(), v.clone(), true),
    }
}

/// Drops one argument position whose value is the same ground term in every
/// defining clause, moving the equality into the bodies that use it.
fn elide_constant_position(sys: &mut HornSystem) -> bool {
    for decl in &sys.preds {
        let defs: Vec<&PredApp> = sys.defining_clauses(&decl.name).filter_map(|(_, c)| c.head.as_pred()).collect();
        if defs.is_empty() || defs.iter().any(|h| h.is_quantified()) {
            continue;
        }
        for pos in 0..decl.sorts.len() {
            let v = &defs[0].args[pos];
            if !v.is_ground() || defs.iter().any(|h| h.args[pos] != *v) {
                continue;
            }
            let (name, sorts, value) = (decl.name.clone(), decl.sorts.clone(), v.clone());
            let mut clauses = Vec::new();
            for c in &sys.clauses {
                let mut extra = Vec::new();
                let cut = |a: &PredApp, extra: &mut Vec<Formula>, is_body: bool| -> PredApp {
                    if a.pred != name {
                        return a.clone();
                    }
                    let mut a = a.clone();
                    let t = a.args.remove(pos);
                    if is_body {
                        extra.push(equality(&t, &value));
                    }
                    a
                };
                let body: Vec<PredApp> = c.body.iter().map(|a| cut(a, &mut extra, true)).collect();
                let head = match &c.head {
                    Head::Pred(h) => Head::Pred(cut(h, &mut extra, false)),
                    Head::False => Head::False,
                };
                extra.insert(0, c.constraint.clone());
                let mut out = Clause { vars: c.vars.clone(), body, constraint: Formula::and(extra), head };
                if out.constraint == Formula::False {
                    continue;
                }
                out.refresh_vars(&BTreeMap::new());
                clauses.push(out);
            }
            sys.clauses = clauses;
            sys.pred_mut(&name).unwrap().sorts.remove(pos);
            sys.record(Step::ConstPosition { pred: name, sorts, pos, value });
            return true;
        }
    }
    false
}

/// Removes argument positions that are never constrained or read. A position
/// is live if some occurrence holds a non-variable term, or a variable that
/// is constrained or shared with a live position of the same clause.
fn drop_dead_positions(sys: &mut HornSystem) {
    let mut live: BTreeSet<(String, usize)> = BTreeSet::new();
    loop {
        let before = live.len();
        for c in &sys.clauses {
            let constrained = c.constraint.vars();
            let mut live_vars: BTreeSet<String> = constrained.into_iter().collect();
            let mut occurrences: Vec<(String, usize, &Term)> = Vec::new();
            for a in c.atoms() {
                for (i, t) in a.args.iter().enumerate() {
                    occurrences.push((a.pred.clone(), i, t));
                    if a.is_quantified() || t.as_var().is_none() || live.contains(&(a.pred.clone(), i)) {
                        live_vars.extend(t.vars());
                    }
                }
            }
            for (p, i, t) in occurrences {
                let is_live = t.as_var().is_none() || t.vars().iter().any(|v| live_vars.contains(v));
                if is_live {
                    live.insert((p, i));
                }
            }
        }
        if live.len() == before {
            break;
        }
    }
    let mut dead: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for p in &sys.preds {
        let ds: Vec<usize> = (0..p.sorts.len()).filter(|i| !live.contains(&(p.name.clone(), *i))).collect();
        if !ds.is_empty() {
            dead.insert(p.name.clone(), ds);
        }
    }
    if dead.is_empty() {
        return;
    }
    let cut = |a: &PredApp| -> PredApp {
        match dead.get(&a.pred) {
            None => a.clone(),
            Some(ds) => PredApp {
                pred: a.pred.clone(),
                args: a.args.iter().enumerate().filter(|(i, _)| !ds.contains(i)).map(|(_, t)| t.clone()).collect(),
                bound: a.bound.clone(),
            },
        }
    };
    for c in &mut sys.clauses {
        c.body = c.body.iter().map(cut).collect();
        if let Head::Pred(h) = &c.head {
            c.head = Head::Pred(cut(h));
        }
        c.refresh_vars(&BTreeMap::new());
    }
    for p in &mut sys.preds {
        if let Some(ds) = dead.get(&p.name) {
            let old = p.sorts.clone();
            p.sorts = old.iter().enumerate().filter(|(i, _)| !ds.contains(i)).map(|(_, s)| s.clone()).collect();
            sys.provenance.push(Step::DropArgs { pred: p.name.clone(), sorts: old, positions: ds.clone() });
        }
    }
}
