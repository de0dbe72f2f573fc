use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::clause::{Clause, Head};
use super::provenance::Step;
use super::term::{Sort, Subst, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constructor {
    pub name: String,
    pub fields: Vec<Sort>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Datatype {
    pub name: String,
    pub ctors: Vec<Constructor>,
}

impl Datatype {
    /// A constructor whose fields mention the datatype itself.
    pub fn is_recursive_ctor(&self, ctor: &Constructor) -> bool {
        ctor.fields.iter().any(|s| *s == Sort::Adt(self.name.clone()))
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ::=", self.name)?;
        for (i, c) in self.ctors.iter().enumerate() {
            if i > 0 {
                write!(f, " |")?;
            }
            write!(f, " {}", c.name)?;
            for s in &c.fields {
                write!(f, " {s}")?;
            }
        }
        Ok(())
    }
}

/// Predicate signature. `ok_flag` marks the canonical encoding layout where
/// the last (Bool) position is the success flag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredDecl {
    pub name: String,
    pub sorts: Vec<Sort>,
    pub ok_flag: bool,
}

impl PredDecl {
    pub fn new(name: impl Into<String>, sorts: Vec<Sort>) -> Self {
        PredDecl { name: name.into(), sorts, ok_flag: false }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HornError {
    #[error("sort mismatch: {var} has sort {expected} but is bound to {term} of sort {found}")]
    SortMismatch { var: String, expected: Sort, term: String, found: String },
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("unknown constructor {0}")]
    UnknownConstructor(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HornSystem {
    pub datatypes: Vec<Datatype>,
    pub preds: Vec<PredDecl>,
    pub clauses: Vec<Clause>,
    pub provenance: Vec<Step>,
}

impl HornSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pred(&self, name: &str) -> Option<&PredDecl> {
        self.preds.iter().find(|p| p.name == name)
    }

    pub fn pred_mut(&mut self, name: &str) -> Option<&mut PredDecl> {
        self.preds.iter_mut().find(|p| p.name == name)
    }

    pub fn datatype(&self, name: &str) -> Option<&Datatype> {
        self.datatypes.iter().find(|d| d.name == name)
    }

    pub fn ctor(&self, name: &str) -> Option<(&Datatype, &Constructor)> {
        self.datatypes.iter().find_map(|d| d.ctors.iter().find(|c| c.name == name).map(|c| (d, c)))
    }

    pub fn goals(&self) -> impl Iterator<Item = (usize, &Clause)> {
        self.clauses.iter().enumerate().filter(|(_, c)| c.is_goal())
    }

    pub fn defining_clauses<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = (usize, &'a Clause)> + 'a {
        self.clauses.iter().enumerate().filter(move |(_, c)| c.head.pred_name() == Some(pred))
    }

    /// Edges `head ← body predicate`.
    pub fn dependencies(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut deps: BTreeMap<String, BTreeSet<String>> =
            self.preds.iter().map(|p| (p.name.clone(), BTreeSet::new())).collect();
        for c in &self.clauses {
            if let Some(h) = c.head.pred_name() {
                let e = deps.entry(h.to_string()).or_default();
                for b in &c.body {
                    e.insert(b.pred.clone());
                }
            }
        }
        deps
    }

    /// Predicates lying on a dependency cycle.
    pub fn recursive_preds(&self) -> BTreeSet<String> {
        let deps = self.dependencies();
        let mut out = BTreeSet::new();
        for p in deps.keys() {
            // p is recursive if p is reachable from its own dependencies
            let mut stack: Vec<&String> = deps[p].iter().collect();
            let mut seen = BTreeSet::new();
            while let Some(q) = stack.pop() {
                if q == p {
                    out.insert(p.clone());
                    break;
                }
                if seen.insert(q) {
                    if let Some(next) = deps.get(q) {
                        stack.extend(next.iter());
                    }
                }
            }
        }
        out
    }

    pub fn is_recursive(&self) -> bool {
        !self.recursive_preds().is_empty()
    }

    /// Dependency order (dependencies first); `None` for recursive systems.
    pub fn topological_order(&self) -> Option<Vec<String>> {
        let deps = self.dependencies();
        let mut order = Vec::new();
        let mut done = BTreeSet::new();
        let mut remaining: Vec<String> = deps.keys().cloned().collect();
        while !remaining.is_empty() {
            let before = remaining.len();
            remaining.retain(|p| {
                if deps[p].iter().all(|q| done.contains(q) || !deps.contains_key(q)) {
                    order.push(p.clone());
                    done.insert(p.clone());
                    false
                } else {
                    true
                }
            });
            if remaining.len() == before {
                return None;
            }
        }
        Some(order)
    }

    /// Sort of a term given the clause's variable sorts.
    pub fn term_sort(&self, t: &Term, vars: &BTreeMap<String, Sort>) -> Option<Sort> {
        match t {
            Term::Int(_) => Some(Sort::Int),
            Term::Bool(_) => Some(Sort::Bool),
            Term::Unit => Some(Sort::Unit),
            Term::Var(v) => vars.get(v).cloned(),
            Term::Ctor(c, _) => self.ctor(c).map(|(d, _)| Sort::Adt(d.name.clone())),
        }
    }

    /// Sort-checked, capture-avoiding simultaneous substitution into one
    /// clause. `extra` gives sorts of variables the binding introduces.
    pub fn substitute(
        &self,
        clause: &Clause,
        binding: &Subst,
        extra: &BTreeMap<String, Sort>,
    ) -> Result<Clause, HornError> {
        let mut env = clause.sort_map();
        env.extend(extra.iter().map(|(k, v)| (k.clone(), v.clone())));
        for (var, term) in binding {
            let Some(expected) = clause.sort_of(var) else { continue };
            let found = self.term_sort(term, &env);
            if found.as_ref() != Some(expected) {
                return Err(HornError::SortMismatch {
                    var: var.clone(),
                    expected: expected.clone(),
                    term: term.to_string(),
                    found: found.map(|s| s.to_string()).unwrap_or_else(|| "?".into()),
                });
            }
        }
        Ok(clause.subst_unchecked(binding, &env))
    }

    /// Drops predicate and datatype declarations no clause refers to.
    /// Datatypes still referenced by a remaining signature or constructor are kept.
    pub fn prune_declarations(&mut self) {
        let used: BTreeSet<&str> = self.clauses.iter().flat_map(|c| c.atoms().map(|a| a.pred.as_str())).collect();
        self.preds.retain(|p| used.contains(p.name.as_str()));
        let mut live: BTreeSet<String> = BTreeSet::new();
        let mark = |s: &Sort, live: &mut BTreeSet<String>| {
            if let Sort::Adt(n) = s {
                live.insert(n.clone());
            }
        };
        for p in &self.preds {
            p.sorts.iter().for_each(|s| mark(s, &mut live));
        }
        for c in &self.clauses {
            c.vars.iter().for_each(|(_, s)| mark(s, &mut live));
        }
        loop {
            let before = live.len();
            for d in &self.datatypes {
                if live.contains(&d.name) {
                    for c in &d.ctors {
                        c.fields.iter().for_each(|s| mark(s, &mut live));
                    }
                }
            }
            if live.len() == before {
                break;
            }
        }
        self.datatypes.retain(|d| live.contains(&d.name));
    }

    pub fn record(&mut self, step: Step) {
        self.provenance.push(step);
    }

    /// Does any clause mention a quantified atom?
    pub fn has_quantified_atoms(&self) -> bool {
        self.clauses.iter().any(|c| c.atoms().any(|a| a.is_quantified()))
    }

    pub fn goal_count(&self) -> usize {
        self.clauses.iter().filter(|c| matches!(c.head, Head::False)).count()
    }
}

impl fmt::Display for HornSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.datatypes {
            writeln!(f, "{d}")?;
        }
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
