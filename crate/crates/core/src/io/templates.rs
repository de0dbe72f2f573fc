//! `.templates` files: `(template CLAUSE POS (e₁ … e_k))` where POS is
//! `head` or `(body I)` and each eᵢ is an affine SMT-LIB term over the
//! clause's variables and fresh parameters `?p`.

use std::fmt::Write;

use super::sexpr::{parse_all, SExpr};
use super::syntax::{lin_to_smt, Scope};
use super::IoError;
use crate::horn::{HornSystem, Sort};
use crate::transforms::{AtomPos, InstantiationTemplate};

fn symbols(e: &SExpr, out: &mut Vec<String>) {
    match e {
        SExpr::Atom(a, _) if a.parse::<i128>().is_err() && !matches!(a.as_str(), "+" | "-" | "*") => {
            out.push(a.clone())
        }
        SExpr::Atom(..) => {}
        SExpr::List(items, _) => items.iter().for_each(|i| symbols(i, out)),
    }
}

pub fn parse_templates(text: &str) -> Result<InstantiationTemplate, IoError> {
    let empty = HornSystem::new();
    let mut t = InstantiationTemplate::new();
    for e in parse_all(text)? {
        let Some(("template", [clause, pos, terms])) = e.call() else {
            return Err(e.error("expected (template CLAUSE POS (terms…))"));
        };
        let clause: usize =
            clause.atom().and_then(|a| a.parse().ok()).ok_or_else(|| clause.error("clause index expected"))?;
        let pos = match (pos.atom(), pos.call()) {
            (Some("head"), _) => AtomPos::Head,
            (_, Some(("body", [i]))) => {
                AtomPos::Body(i.atom().and_then(|a| a.parse().ok()).ok_or_else(|| i.error("body index expected"))?)
            }
            _ => return Err(pos.error("position must be head or (body I)")),
        };
        let items = terms.list().ok_or_else(|| terms.error("expected a list of terms"))?;
        let mut scope = Scope::new(&empty);
        let mut names = Vec::new();
        symbols(terms, &mut names);
        for n in names {
            scope.vars.insert(n, Sort::Int);
        }
        let lins = items.iter().map(|i| scope.read_lin(i)).collect::<Result<Vec<_>, _>>()?;
        if t.entries.insert((clause, pos), lins).is_some() {
            return Err(e.error(format!("duplicate template for clause {clause} {pos}")));
        }
    }
    Ok(t)
}

pub fn write_templates(t: &InstantiationTemplate) -> String {
    let mut out = String::new();
    for ((c, pos), terms) in &t.entries {
        let p = match pos {
            AtomPos::Head => "head".to_string(),
            AtomPos::Body(i) => format!("(body {i})"),
        };
        let ts: Vec<String> = terms.iter().map(lin_to_smt).collect();
        let _ = writeln!(out, "(template {c} {p} ({}))", ts.join(" "));
    }
    out
}
