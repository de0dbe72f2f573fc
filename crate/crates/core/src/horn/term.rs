use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::linear::LinExpr;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    Int,
    Bool,
    Unit,
    Adt(String),
}

impl Sort {
    pub fn is_adt(&self) -> bool {
        matches!(self, Sort::Adt(_))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => write!(f, "Int"),
            Sort::Bool => write!(f, "Bool"),
            Sort::Unit => write!(f, "Unit"),
            Sort::Adt(name) => write!(f, "{name}"),
        }
    }
}

/// A sorted term. Integer-sorted terms are always `Int(LinExpr)` (a bare
/// integer variable `x` is `Int(LinExpr::var("x"))`); `Var` only holds
/// variables of sort Bool, Unit or an ADT.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(LinExpr),
    Var(String),
    Bool(bool),
    Unit,
    Ctor(String, Vec<Term>),
}

/// Simultaneous substitution. Integer variables must map to `Term::Int`.
pub type Subst = BTreeMap<String, Term>;

impl Term {
    pub fn int_var(name: impl Into<String>) -> Term {
        Term::Int(LinExpr::var(name))
    }

    pub fn int(k: i128) -> Term {
        Term::Int(LinExpr::constant(k))
    }

    /// The variable of sort `sort` named `name`.
    pub fn var_of(name: impl Into<String>, sort: &Sort) -> Term {
        match sort {
            Sort::Int => Term::int_var(name),
            _ => Term::Var(name.into()),
        }
    }

    /// Name of the variable if this term is exactly one variable.
    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Int(e) => e.as_var(),
            _ => None,
        }
    }

    pub fn as_lin(&self) -> Option<&LinExpr> {
        match self {
            Term::Int(e) => Some(e),
            _ => None,
        }
    }

    pub fn ctor_name(&self) -> Option<&str> {
        match self {
            Term::Ctor(c, _) => Some(c),
            _ => None,
        }
    }

    /// Appends variables in first-occurrence order (duplicates skipped).
    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Int(e) => {
                for v in e.vars() {
                    if !out.iter().any(|o| o == v) {
                        out.push(v.to_string());
                    }
                }
            }
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Ctor(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Bool(_) | Term::Unit => {}
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Term::Int(e) => e.coeff(var) != 0,
            Term::Var(v) => v == var,
            Term::Ctor(_, args) => args.iter().any(|a| a.mentions(var)),
            Term::Bool(_) | Term::Unit => false,
        }
    }

    pub fn mentions_ctor(&self, ctor: &str) -> bool {
        match self {
            Term::Ctor(c, args) => c == ctor || args.iter().any(|a| a.mentions_ctor(ctor)),
            _ => false,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Int(e) => e.is_constant(),
            Term::Var(_) => false,
            Term::Ctor(_, args) => args.iter().all(Term::is_ground),
            Term::Bool(_) | Term::Unit => true,
        }
    }

    pub fn subst(&self, s: &Subst) -> Term {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Term::Int(e) => {
                let ints: BTreeMap<String, LinExpr> = e
                    .vars()
                    .filter_map(|v| match s.get(v) {
                        Some(Term::Int(by)) => Some((v.to_string(), by.clone())),
                        _ => None,
                    })
                    .collect();
                Term::Int(e.substitute_all(&ints))
            }
            Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Ctor(c, args) => Term::Ctor(c.clone(), args.iter().map(|a| a.subst(s)).collect()),
            Term::Bool(_) | Term::Unit => self.clone(),
        }
    }

    pub fn rename(&self, f: &impl Fn(&str) -> String) -> Term {
        match self {
            Term::Int(e) => Term::Int(e.rename(f)),
            Term::Var(v) => Term::Var(f(v)),
            Term::Ctor(c, args) => Term::Ctor(c.clone(), args.iter().map(|a| a.rename(f)).collect()),
            Term::Bool(_) | Term::Unit => self.clone(),
        }
    }

    pub fn rename_ctor(&self, f: &impl Fn(&str) -> String) -> Term {
        match self {
            Term::Ctor(c, args) => Term::Ctor(f(c), args.iter().map(|a| a.rename_ctor(f)).collect()),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(e) => write!(f, "{e}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Bool(b) => write!(f, "{b}"),
            Term::Unit => write!(f, "unit"),
            Term::Ctor(c, args) if args.is_empty() => write!(f, "{c}"),
            Term::Ctor(c, args) => {
                write!(f, "{c}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
