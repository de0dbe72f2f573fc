use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::horn::{Formula, HornSystem, LinExpr, Rel, Sort, Term};

/// A ground value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i128),
    Bool(bool),
    Unit,
    Ctor(String, Vec<Value>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Unit => write!(f, "unit"),
            Value::Ctor(c, args) if args.is_empty() => write!(f, "{c}"),
            Value::Ctor(c, args) => {
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

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Int(n) if i64::try_from(*n).is_ok() => s.serialize_i64(*n as i64),
            Value::Bool(b) => s.serialize_bool(*b),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl Value {
    pub fn to_term(&self) -> Term {
        match self {
            Value::Int(n) => Term::int(*n),
            Value::Bool(b) => Term::Bool(*b),
            Value::Unit => Term::Unit,
            Value::Ctor(c, args) => Term::Ctor(c.clone(), args.iter().map(Value::to_term).collect()),
        }
    }
}

/// Values of variables.
pub type Assignment = BTreeMap<String, Value>;

pub fn eval_lin(e: &LinExpr, a: &Assignment) -> Option<i128> {
    e.eval(&|v| match a.get(v) {
        Some(Value::Int(n)) => Some(*n),
        _ => None,
    })
}

pub fn eval_term(t: &Term, a: &Assignment) -> Option<Value> {
    match t {
        Term::Int(e) => eval_lin(e, a).map(Value::Int),
        Term::Var(v) => a.get(v).cloned(),
        Term::Bool(b) => Some(Value::Bool(*b)),
        Term::Unit => Some(Value::Unit),
        Term::Ctor(c, args) => {
            let vs: Option<Vec<Value>> = args.iter().map(|x| eval_term(x, a)).collect();
            Some(Value::Ctor(c.clone(), vs?))
        }
    }
}

/// Truth value of a formula; `None` if some variable is unassigned.
pub fn eval_formula(f: &Formula, a: &Assignment) -> Option<bool> {
    match f {
        Formula::True => Some(true),
        Formula::False => Some(false),
        Formula::Lin(atom) => {
            let v = eval_lin(&atom.expr, a)?;
            Some(match atom.rel {
                Rel::Eq => v == 0,
                Rel::Ne => v != 0,
                Rel::Le => v <= 0,
            })
        }
        Formula::Bool(v, p) => match a.get(v) {
            Some(Value::Bool(b)) => Some(b == p),
            _ => None,
        },
        Formula::TermEq(x, y, p) => Some((eval_term(x, a)? == eval_term(y, a)?) == *p),
        Formula::And(ps) => {
            let mut all = Some(true);
            for p in ps {
                match eval_formula(p, a) {
                    Some(false) => return Some(false),
                    None => all = None,
                    _ => {}
                }
            }
            all
        }
        Formula::Or(ps) => {
            let mut any = Some(false);
            for p in ps {
                match eval_formula(p, a) {
                    Some(true) => return Some(true),
                    None => any = None,
                    _ => {}
                }
            }
            any
        }
    }
}

/// Some value of `sort`: 0, false, unit, or the smallest non-recursive
/// constructor term of a datatype.
pub fn default_value(sort: &Sort, sys: &HornSystem) -> Value {
    fn go(sort: &Sort, sys: &HornSystem, depth: usize) -> Option<Value> {
        match sort {
            Sort::Int => Some(Value::Int(0)),
            Sort::Bool => Some(Value::Bool(false)),
            Sort::Unit => Some(Value::Unit),
            Sort::Adt(d) if depth < 8 => {
                let dt = sys.datatype(d)?;
                let mut ctors: Vec<_> = dt.ctors.iter().collect();
                ctors.sort_by_key(|c| dt.is_recursive_ctor(c));
                ctors.into_iter().find_map(|c| {
                    let fs: Option<Vec<Value>> = c.fields.iter().map(|s| go(s, sys, depth + 1)).collect();
                    Some(Value::Ctor(c.name.clone(), fs?))
                })
            }
            Sort::Adt(_) => None,
        }
    }
    go(sort, sys, 0).unwrap_or_else(|| Value::Ctor("?".into(), vec![]))
}

/// Extends `a` with default values for the listed variables it misses.
pub fn complete(a: &mut Assignment, vars: &[(String, Sort)], sys: &HornSystem) {
    for (v, s) in vars {
        a.entry(v.clone()).or_insert_with(|| default_value(s, sys));
    }
}
