use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::clause::PredApp;
use super::system::HornSystem;
use super::term::{Sort, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    UnknownPredicate,
    Arity,
    ArgumentSort,
    UnknownConstructor,
    ConstructorArity,
    FreeVariable,
    VariableSort,
    UnknownDatatype,
    Duplicate,
    OkFlag,
    QuantifiedAtom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    pub clause: Option<usize>,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.clause {
            Some(i) => write!(f, "clause {i}: {:?}: {}", self.rule, self.message),
            None => write!(f, "{:?}: {}", self.rule, self.message),
        }
    }
}

struct Checker<'a> {
    sys: &'a HornSystem,
    defects: Vec<Defect>,
    clause: Option<usize>,
}

impl Checker<'_> {
    fn defect(&mut self, rule: Rule, message: String) {
        self.defects.push(Defect { clause: self.clause, rule, message });
    }

    fn check_sort(&mut self, s: &Sort) {
        if let Sort::Adt(n) = s {
            if self.sys.datatype(n).is_none() {
                self.defect(Rule::UnknownDatatype, format!("sort {n} is not declared"));
            }
        }
    }

    /// Checks `t` against `expected`, returning false on mismatch.
    fn check_term(&mut self, t: &Term, expected: &Sort, vars: &BTreeMap<String, Sort>) {
        match t {
            Term::Int(e) => {
                if *expected != Sort::Int {
                    self.defect(Rule::ArgumentSort, format!("{t} is Int, expected {expected}"));
                }
                for v in e.vars() {
                    match vars.get(v) {
                        None => self.defect(Rule::FreeVariable, format!("{v} is not quantified")),
                        Some(Sort::Int) => {}
                        Some(s) => self.defect(Rule::VariableSort, format!("{v} of sort {s} used as Int")),
                    }
                }
            }
            Term::Var(v) => match vars.get(v) {
                None => self.defect(Rule::FreeVariable, format!("{v} is not quantified")),
                Some(Sort::Int) => {
                    self.defect(Rule::VariableSort, format!("Int variable {v} used as a non-linear term"))
                }
                Some(s) if s != expected => {
                    self.defect(Rule::ArgumentSort, format!("{v} has sort {s}, expected {expected}"))
                }
                Some(_) => {}
            },
            Term::Bool(_) if *expected != Sort::Bool => {
                self.defect(Rule::ArgumentSort, format!("{t} is Bool, expected {expected}"))
            }
            Term::Unit if *expected != Sort::Unit => {
                self.defect(Rule::ArgumentSort, format!("unit used at sort {expected}"))
            }
            Term::Bool(_) | Term::Unit => {}
            Term::Ctor(c, args) => {
                let Some((d, ctor)) = self.sys.ctor(c) else {
                    self.defect(Rule::UnknownConstructor, format!("constructor {c} is not declared"));
                    return;
                };
                if Sort::Adt(d.name.clone()) != *expected {
                    self.defect(Rule::ArgumentSort, format!("{t} has sort {}, expected {expected}", d.name));
                }
                if args.len() != ctor.fields.len() {
                    self.defect(
                        Rule::ConstructorArity,
                        format!("{c} takes {} arguments, got {}", ctor.fields.len(), args.len()),
                    );
                    return;
                }
                let fields = ctor.fields.clone();
                for (a, s) in args.iter().zip(&fields) {
                    self.check_term(a, s, vars);
                }
            }
        }
    }

    fn check_atom(&mut self, a: &PredApp, vars: &BTreeMap<String, Sort>) {
        let Some(decl) = self.sys.pred(&a.pred) else {
            self.defect(Rule::UnknownPredicate, format!("{} is not declared", a.pred));
            return;
        };
        if decl.sorts.len() != a.args.len() {
            self.defect(
                Rule::Arity,
                format!("{} expects {} arguments, got {}", a.pred, decl.sorts.len(), a.args.len()),
            );
            return;
        }
        let mut local = vars.clone();
        for (i, b) in a.bound.iter().enumerate() {
            if a.args.get(i).and_then(Term::as_var) != Some(b.as_str()) {
                self.defect(Rule::QuantifiedAtom, format!("bound variable {b} must be argument {i} of {a}"));
            }
            local.insert(b.clone(), Sort::Int);
        }
        let sorts = decl.sorts.clone();
        for (t, s) in a.args.iter().zip(&sorts) {
            self.check_term(t, s, &local);
        }
    }
}

/// Lists every violated well-formedness rule; empty iff the system is valid.
pub fn validate(sys: &HornSystem) -> Vec<Defect> {
    let mut ck = Checker { sys, defects: Vec::new(), clause: None };

    let mut names = BTreeSet::new();
    for p in &sys.preds {
        if !names.insert(p.name.as_str()) {
            ck.defect(Rule::Duplicate, format!("predicate {} declared twice", p.name));
        }
        for s in &p.sorts {
            ck.check_sort(s);
        }
        if p.ok_flag && p.sorts.last() != Some(&Sort::Bool) {
            ck.defect(Rule::OkFlag, format!("{} is flagged but its last position is not Bool", p.name));
        }
    }
    let mut ctors = BTreeSet::new();
    let mut dts = BTreeSet::new();
    for d in &sys.datatypes {
        if !dts.insert(d.name.as_str()) {
            ck.defect(Rule::Duplicate, format!("datatype {} declared twice", d.name));
        }
        for c in &d.ctors {
            if !ctors.insert(c.name.as_str()) {
                ck.defect(Rule::Duplicate, format!("constructor {} declared twice", c.name));
            }
            for s in &c.fields {
                ck.check_sort(s);
            }
        }
    }

    for (i, c) in sys.clauses.iter().enumerate() {
        ck.clause = Some(i);
        let vars = c.sort_map();
        if vars.len() != c.vars.len() {
            ck.defect(Rule::Duplicate, "variable quantified twice".into());
        }
        for (_, s) in &c.vars {
            ck.check_sort(s);
        }
        for v in c.free_vars() {
            if !vars.contains_key(&v) {
                ck.defect(Rule::FreeVariable, format!("{v} is not in the quantifier list"));
            }
        }
        for a in c.atoms() {
            ck.check_atom(a, &vars);
        }
        let mut cvars = Vec::new();
        c.constraint.collect_vars(&mut cvars);
        for v in cvars {
            if !vars.contains_key(&v) {
                ck.defect(Rule::FreeVariable, format!("{v} in constraint is not quantified"));
            }
        }
    }
    // free-variable defects may be reported twice (atom and clause level)
    let mut seen = Vec::new();
    ck.defects.retain(|d| {
        if seen.contains(d) {
            false
        } else {
            seen.push(d.clone());
            true
        }
    });
    ck.defects
}
