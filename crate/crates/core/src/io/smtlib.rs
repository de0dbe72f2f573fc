use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::sexpr::{parse_all, symbol, SExpr};
use super::syntax::{formula_to_smt, sort_to_smt, term_to_smt, Scope};
use super::IoError;
use crate::horn::{validate, Clause, Constructor, Datatype, Formula, Head, HornSystem, PredApp, PredDecl, Sort};

/// Predicate names that would collide with a constructor (SMT-LIB has one
/// function namespace) get a `_p` suffix.
pub fn emitted_pred_names(s: &HornSystem) -> BTreeMap<String, String> {
    let mut taken: BTreeSet<String> = s.datatypes.iter().flat_map(|d| d.ctors.iter().map(|c| c.name.clone())).collect();
    taken.insert("unit".into());
    let preds: BTreeSet<&str> = s.preds.iter().map(|p| p.name.as_str()).collect();
    let mut out = BTreeMap::new();
    for p in &s.preds {
        let mut name = p.name.clone();
        while taken.contains(&name) || (name != p.name && preds.contains(name.as_str())) {
            name.push_str("_p");
        }
        taken.insert(name.clone());
        out.insert(p.name.clone(), name);
    }
    out
}

fn uses_unit(s: &HornSystem) -> bool {
    s.preds.iter().any(|p| p.sorts.contains(&Sort::Unit))
        || s.datatypes.iter().any(|d| d.ctors.iter().any(|c| c.fields.contains(&Sort::Unit)))
        || s.clauses.iter().any(|c| c.vars.iter().any(|(_, srt)| *srt == Sort::Unit))
}

fn atom_to_smt(a: &PredApp, names: &BTreeMap<String, String>) -> String {
    let name = symbol(names.get(&a.pred).unwrap_or(&a.pred));
    if a.args.is_empty() {
        return name;
    }
    let args: Vec<String> = a.args.iter().map(term_to_smt).collect();
    format!("({name} {})", args.join(" "))
}

fn clause_to_smt(c: &Clause, names: &BTreeMap<String, String>) -> String {
    let mut premise: Vec<String> = c.body.iter().map(|a| atom_to_smt(a, names)).collect();
    match &c.constraint {
        Formula::True => {}
        Formula::And(parts) => premise.extend(parts.iter().map(formula_to_smt)),
        f => premise.push(formula_to_smt(f)),
    }
    let premise = match premise.len() {
        0 => "true".to_string(),
        1 => premise.pop().unwrap(),
        _ => format!("(and {})", premise.join(" ")),
    };
    let head = match &c.head {
        Head::Pred(h) => atom_to_smt(h, names),
        Head::False => "false".into(),
    };
    let body = format!("(=> {premise} {head})");
    if c.vars.is_empty() {
        return format!("(assert {body})");
    }
    let vars: Vec<String> = c.vars.iter().map(|(v, s)| format!("({} {})", symbol(v), sort_to_smt(s))).collect();
    format!("(assert (forall ({}) {body}))", vars.join(" "))
}

/// Renders `s` as a HORN script. Declarations are sorted by name.
pub fn emit_smtlib(s: &HornSystem) -> Result<String, IoError> {
    if s.has_quantified_atoms() {
        return Err(IoError::QuantifiedAtoms);
    }
    let names = emitted_pred_names(s);
    let mut out = String::from("(set-logic HORN)\n");
    let mut dts: Vec<&Datatype> = s.datatypes.iter().collect();
    dts.sort_by(|a, b| a.name.cmp(&b.name));
    let unit = Datatype { name: "Unit".into(), ctors: vec![Constructor { name: "unit".into(), fields: vec![] }] };
    if uses_unit(s) {
        dts.insert(0, &unit);
    }
    if !dts.is_empty() {
        let heads: Vec<String> = dts.iter().map(|d| format!("({} 0)", symbol(&d.name))).collect();
        let bodies: Vec<String> = dts
            .iter()
            .map(|d| {
                let cs: Vec<String> = d
                    .ctors
                    .iter()
                    .map(|c| {
                        let mut t = format!("({}", symbol(&c.name));
                        for (i, f) in c.fields.iter().enumerate() {
                            let _ = write!(t, " ({} {})", symbol(&format!("{}.{i}", c.name)), sort_to_smt(f));
                        }
                        t.push(')');
                        t
                    })
                    .collect();
                format!("({})", cs.join(" "))
            })
            .collect();
        let _ = writeln!(out, "(declare-datatypes ({}) ({}))", heads.join(" "), bodies.join(" "));
    }
    let mut preds: Vec<&PredDecl> = s.preds.iter().collect();
    preds.sort_by(|a, b| names[&a.name].cmp(&names[&b.name]));
    for p in preds {
        let sorts: Vec<String> = p.sorts.iter().map(sort_to_smt).collect();
        let _ = writeln!(out, "(declare-fun {} ({}) Bool)", symbol(&names[&p.name]), sorts.join(" "));
    }
    for c in &s.clauses {
        out.push_str(&clause_to_smt(c, &names));
        out.push('\n');
    }
    out.push_str("(check-sat)\n");
    Ok(out)
}

fn read_datatypes(sys: &mut HornSystem, heads: &SExpr, bodies: &SExpr) -> Result<(), IoError> {
    let hs = heads.list().ok_or_else(|| heads.error("expected datatype names"))?;
    let bs = bodies.list().ok_or_else(|| bodies.error("expected constructor lists"))?;
    if hs.len() != bs.len() {
        return Err(bodies.error("datatype count mismatch"));
    }
    let mut names = Vec::new();
    for h in hs {
        match h.list() {
            Some([SExpr::Atom(n, _), SExpr::Atom(arity, _)]) if arity == "0" => names.push(n.clone()),
            _ => return Err(h.fragment(format!("unsupported datatype declaration {h}"))),
        }
    }
    let start = sys.datatypes.len();
    for n in &names {
        if n != "Unit" {
            sys.datatypes.push(Datatype { name: n.clone(), ctors: Vec::new() });
        }
    }
    let mut idx = start;
    for (n, b) in names.iter().zip(bs) {
        let cs = b.list().ok_or_else(|| b.error("expected constructor list"))?;
        if n == "Unit" {
            if b.to_string() != "((unit))" {
                return Err(b.fragment("Unit must have the single constructor unit"));
            }
            continue;
        }
        let mut ctors = Vec::new();
        for c in cs {
            let (name, fields) = match c {
                SExpr::Atom(a, _) => (a.clone(), Vec::new()),
                SExpr::List(items, _) => {
                    let name =
                        items.first().and_then(|x| x.atom()).ok_or_else(|| c.error("constructor name expected"))?;
                    let scope = Scope::new(sys);
                    let fields = scope.read_binders(&SExpr::List(items[1..].to_vec(), c.loc()))?;
                    (name.to_string(), fields.into_iter().map(|(_, s)| s).collect())
                }
            };
            ctors.push(Constructor { name, fields });
        }
        sys.datatypes[idx].ctors = ctors;
        idx += 1;
    }
    Ok(())
}

fn read_atom(scope: &Scope, e: &SExpr) -> Result<Option<PredApp>, IoError> {
    let (name, args) = match e {
        SExpr::Atom(a, _) => (a.as_str(), &[][..]),
        _ => match e.call() {
            Some(c) => c,
            None => return Ok(None),
        },
    };
    let Some(decl) = scope.sys.pred(name) else { return Ok(None) };
    if decl.sorts.len() != args.len() {
        return Err(e.error(format!("{name} expects {} arguments", decl.sorts.len())));
    }
    let mut terms = Vec::new();
    for (a, s) in args.iter().zip(&decl.sorts) {
        let (t, ts) = scope.read_term(a)?;
        if ts != *s {
            return Err(a.error(format!("argument of {name} has sort {ts}, expected {s}")));
        }
        terms.push(t);
    }
    Ok(Some(PredApp::new(name, terms)))
}

fn flatten_and<'e>(e: &'e SExpr, out: &mut Vec<&'e SExpr>) {
    match e.call() {
        Some(("and", parts)) => parts.iter().for_each(|p| flatten_and(p, out)),
        _ => out.push(e),
    }
}

fn read_clause(sys: &HornSystem, e: &SExpr) -> Result<Clause, IoError> {
    let mut scope = Scope::new(sys);
    let mut e = e;
    if let Some(("forall", [binders, body])) = e.call() {
        for (v, s) in scope.read_binders(binders)? {
            scope.vars.insert(v, s);
        }
        e = body;
    }
    if let Some(("exists", _)) = e.call() {
        return Err(e.fragment("existential quantifier"));
    }
    let (premise, head) = match e.call() {
        Some(("=>", [p, h])) => (Some(p), Some(h)),
        Some(("not", [p])) => (Some(p), None),
        _ => (None, Some(e)),
    };
    let mut body = Vec::new();
    let mut constraint = Vec::new();
    if let Some(p) = premise {
        let mut parts = Vec::new();
        flatten_and(p, &mut parts);
        for part in parts {
            match read_atom(&scope, part)? {
                Some(a) => body.push(a),
                None => constraint.push(scope.read_formula(part)?),
            }
        }
    }
    let head = match head {
        None => Head::False,
        Some(h) => match read_atom(&scope, h)? {
            Some(a) => Head::Pred(a),
            None => {
                let f = scope.read_formula(h).map_err(|err| match err {
                    IoError::Syntax { loc, msg } if msg.contains("predicate") => {
                        IoError::Fragment { loc, msg: format!("non-Horn head: {msg}") }
                    }
                    other => other,
                })?;
                constraint.push(f.negate());
                Head::False
            }
        },
    };
    Ok(Clause::build(&scope.vars, body, Formula::and(constraint), head))
}

/// Reads a HORN script in the emitted fragment.
pub fn parse_smtlib(text: &str) -> Result<HornSystem, IoError> {
    let mut sys = HornSystem::new();
    for cmd in parse_all(text)? {
        let (op, args) = cmd.call().ok_or_else(|| cmd.error("expected a command"))?;
        match (op, args) {
            ("set-logic" | "set-info" | "set-option" | "check-sat" | "exit" | "get-model", _) => {}
            ("declare-datatypes", [h, b]) => read_datatypes(&mut sys, h, b)?,
            ("declare-datatype", [n, b]) => {
                let h =
                    SExpr::List(vec![SExpr::List(vec![n.clone(), SExpr::Atom("0".into(), n.loc())], n.loc())], n.loc());
                let b = SExpr::List(vec![b.clone()], b.loc());
                read_datatypes(&mut sys, &h, &b)?
            }
            ("declare-fun", [SExpr::Atom(name, _), params, ret]) => {
                if ret.atom() != Some("Bool") {
                    return Err(ret.fragment("predicates must return Bool"));
                }
                let scope = Scope::new(&sys);
                let ps = params.list().ok_or_else(|| params.error("expected parameter sorts"))?;
                let sorts = ps.iter().map(|p| scope.read_sort(p)).collect::<Result<Vec<_>, _>>()?;
                sys.preds.push(PredDecl::new(name.clone(), sorts));
            }
            ("assert", [body]) => {
                let c = read_clause(&sys, body)?;
                sys.clauses.push(c);
            }
            _ => return Err(cmd.fragment(format!("unsupported command {op}"))),
        }
    }
    let defects = validate(&sys);
    if !defects.is_empty() {
        return Err(IoError::Invalid(defects.iter().map(|d| d.to_string()).collect()));
    }
    Ok(sys)
}
