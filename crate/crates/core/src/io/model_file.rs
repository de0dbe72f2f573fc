//! `.model` files: one `(define-interp (p ((x Int) …)) (cases (PATTERN φ) …))`
//! per predicate. PATTERN is `_` or a list of constructor tests
//! `(param (ctor binder…))`, nullary constructors written `(param ctor)`.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::sexpr::{parse_all, symbol, SExpr};
use super::syntax::{formula_to_smt, sort_to_smt, Scope};
use super::IoError;
use crate::horn::{Case, HornSystem, Interp, Model, PatternElem};

fn read_pattern(
    scope: &mut Scope,
    params: &[(String, crate::horn::Sort)],
    e: &SExpr,
) -> Result<Vec<PatternElem>, IoError> {
    if e.atom() == Some("_") {
        return Ok(Vec::new());
    }
    let items = e.list().ok_or_else(|| e.error("pattern must be _ or a list of constructor tests"))?;
    let mut out = Vec::new();
    for it in items {
        let Some([SExpr::Atom(p, _), test]) = it.list() else {
            return Err(it.error(format!("malformed constructor test {it}")));
        };
        let param =
            params.iter().position(|(n, _)| n == p).ok_or_else(|| it.error(format!("unknown parameter {p}")))?;
        let (ctor, binders): (String, Vec<String>) = match test {
            SExpr::Atom(c, _) => (c.clone(), Vec::new()),
            SExpr::List(..) => {
                let (c, bs) = test.call().ok_or_else(|| test.error("constructor expected"))?;
                let bs = bs
                    .iter()
                    .map(|b| b.atom().map(str::to_string).ok_or_else(|| b.error("binder must be a symbol")))
                    .collect::<Result<Vec<_>, _>>()?;
                (c.to_string(), bs)
            }
        };
        let (d, c) = scope.sys.ctor(&ctor).ok_or_else(|| test.error(format!("unknown constructor {ctor}")))?;
        if params[param].1 != crate::horn::Sort::Adt(d.name.clone()) {
            return Err(test.error(format!("{ctor} does not build {}", params[param].1)));
        }
        if c.fields.len() != binders.len() {
            return Err(test.error(format!("{ctor} has {} fields", c.fields.len())));
        }
        for (b, s) in binders.iter().zip(&c.fields) {
            if scope.vars.insert(b.clone(), s.clone()).is_some() {
                return Err(test.error(format!("binder {b} shadows another name")));
            }
        }
        out.push(PatternElem { param, ctor, binders });
    }
    Ok(out)
}

/// Reads a model for predicates of `sys`.
pub fn parse_model(text: &str, sys: &HornSystem) -> Result<Model, IoError> {
    let mut model = Model::new();
    for e in parse_all(text)? {
        let Some(("define-interp", [sig, cases])) = e.call() else {
            return Err(e.error("expected (define-interp (pred (params…)) (cases …))"));
        };
        let Some([SExpr::Atom(pred, _), params]) = sig.list() else {
            return Err(sig.error("expected (pred ((x Sort) …))"));
        };
        let scope = Scope::new(sys);
        let params = scope.read_binders(params)?;
        let decl = sys.pred(pred).ok_or_else(|| sig.error(format!("unknown predicate {pred}")))?;
        let sorts: Vec<_> = params.iter().map(|(_, s)| s.clone()).collect();
        if sorts != decl.sorts {
            return Err(sig.error(format!("parameter sorts of {pred} do not match its declaration")));
        }
        let distinct: BTreeSet<&String> = params.iter().map(|(n, _)| n).collect();
        if distinct.len() != params.len() {
            return Err(sig.error("duplicate parameter"));
        }
        let Some(("cases", cs)) = cases.call() else {
            return Err(cases.error("expected (cases (pattern formula) …)"));
        };
        let mut out = Vec::new();
        for c in cs {
            let Some([pat, body]) = c.list() else {
                return Err(c.error("expected (pattern formula)"));
            };
            let mut scope = Scope::new(sys);
            scope.vars.extend(params.iter().cloned());
            let pattern = read_pattern(&mut scope, &params, pat)?;
            out.push(Case { pattern, body: scope.read_formula(body)? });
        }
        if model.get(pred).is_some() {
            return Err(e.error(format!("{pred} interpreted twice")));
        }
        model.insert(pred.clone(), Interp { params, cases: out });
    }
    Ok(model)
}

pub fn write_model(m: &Model) -> String {
    let mut out = String::new();
    for (p, i) in &m.interps {
        let params: Vec<String> = i.params.iter().map(|(n, s)| format!("({} {})", symbol(n), sort_to_smt(s))).collect();
        let _ = writeln!(out, "(define-interp ({} ({}))", symbol(p), params.join(" "));
        let _ = write!(out, "  (cases");
        for c in &i.cases {
            let pat = if c.pattern.is_empty() {
                "_".to_string()
            } else {
                let tests: Vec<String> = c
                    .pattern
                    .iter()
                    .map(|el| {
                        let param = symbol(&i.params[el.param].0);
                        if el.binders.is_empty() {
                            format!("({param} {})", symbol(&el.ctor))
                        } else {
                            let bs: Vec<String> = el.binders.iter().map(|b| symbol(b)).collect();
                            format!("({param} ({} {}))", symbol(&el.ctor), bs.join(" "))
                        }
                    })
                    .collect();
                format!("({})", tests.join(" "))
            };
            let _ = write!(out, "\n    ({pat} {})", formula_to_smt(&c.body));
        }
        out.push_str("))\n");
    }
    out
}
