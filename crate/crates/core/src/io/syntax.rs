//! SMT-LIB rendering and reading of terms and constraint formulas, shared by
//! the HORN script, model and template formats.

use std::collections::BTreeMap;

use super::sexpr::{symbol, SExpr};
use super::IoError;
use crate::horn::{CmpOp, Formula, HornSystem, LinExpr, Rel, Sort, Term};

pub fn sort_to_smt(s: &Sort) -> String {
    match s {
        Sort::Int => "Int".into(),
        Sort::Bool => "Bool".into(),
        Sort::Unit => "Unit".into(),
        Sort::Adt(d) => symbol(d),
    }
}

fn num(k: i128) -> String {
    if k < 0 {
        format!("(- {})", k.unsigned_abs())
    } else {
        k.to_string()
    }
}

fn monomial(c: i128, v: &str) -> String {
    match c {
        1 => symbol(v),
        -1 => format!("(- {})", symbol(v)),
        _ => format!("(* {} {})", num(c), symbol(v)),
    }
}

fn sum(parts: Vec<String>) -> String {
    match parts.len() {
        0 => "0".into(),
        1 => parts.into_iter().next().unwrap(),
        _ => format!("(+ {})", parts.join(" ")),
    }
}

pub fn lin_to_smt(e: &LinExpr) -> String {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (v, c) in e.coeffs() {
        if c > 0 {
            pos.push(monomial(c, v));
        } else {
            neg.push(monomial(-c, v));
        }
    }
    match e.constant_part() {
        k if k > 0 => pos.push(k.to_string()),
        k if k < 0 => neg.push(k.unsigned_abs().to_string()),
        _ => {}
    }
    match (pos.is_empty(), neg.is_empty()) {
        (true, true) => "0".into(),
        (_, true) => sum(pos),
        (true, false) => format!("(- {})", sum(neg)),
        (false, false) => format!("(- {} {})", sum(pos), neg.join(" ")),
    }
}

/// `lhs - rhs` split into two sides with nonnegative coefficients.
fn sides(e: &LinExpr) -> (String, String) {
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for (v, c) in e.coeffs() {
        if c > 0 {
            lhs.push(monomial(c, v));
        } else {
            rhs.push(monomial(-c, v));
        }
    }
    let k = e.constant_part();
    if k > 0 || (k != 0 && lhs.is_empty() && !rhs.is_empty()) {
        lhs.push(num(k));
    } else if k != 0 {
        rhs.push(num(-k));
    }
    (sum(lhs), sum(rhs))
}

pub fn term_to_smt(t: &Term) -> String {
    match t {
        Term::Int(e) => lin_to_smt(e),
        Term::Var(v) => symbol(v),
        Term::Bool(b) => b.to_string(),
        Term::Unit => "unit".into(),
        Term::Ctor(c, args) if args.is_empty() => symbol(c),
        Term::Ctor(c, args) => {
            let a: Vec<String> = args.iter().map(term_to_smt).collect();
            format!("({} {})", symbol(c), a.join(" "))
        }
    }
}

pub fn formula_to_smt(f: &Formula) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Lin(a) => {
            let (l, r) = sides(&a.expr);
            match a.rel {
                Rel::Eq => format!("(= {l} {r})"),
                Rel::Ne => format!("(not (= {l} {r}))"),
                Rel::Le => format!("(<= {l} {r})"),
            }
        }
        Formula::Bool(v, true) => symbol(v),
        Formula::Bool(v, false) => format!("(not {})", symbol(v)),
        Formula::TermEq(a, b, true) => format!("(= {} {})", term_to_smt(a), term_to_smt(b)),
        Formula::TermEq(a, b, false) => format!("(not (= {} {}))", term_to_smt(a), term_to_smt(b)),
        Formula::And(fs) => format!("(and {})", fs.iter().map(formula_to_smt).collect::<Vec<_>>().join(" ")),
        Formula::Or(fs) => format!("(or {})", fs.iter().map(formula_to_smt).collect::<Vec<_>>().join(" ")),
    }
}

/// Name resolution for reading: variable sorts plus the system's datatypes.
pub struct Scope<'a> {
    pub sys: &'a HornSystem,
    pub vars: BTreeMap<String, Sort>,
}

impl<'a> Scope<'a> {
    pub fn new(sys: &'a HornSystem) -> Self {
        Scope { sys, vars: BTreeMap::new() }
    }

    pub fn read_sort(&self, e: &SExpr) -> Result<Sort, IoError> {
        match e.atom() {
            Some("Int") => Ok(Sort::Int),
            Some("Bool") => Ok(Sort::Bool),
            Some("Unit") => Ok(Sort::Unit),
            Some(d) if self.sys.datatype(d).is_some() => Ok(Sort::Adt(d.to_string())),
            _ => Err(e.error(format!("unknown sort {e}"))),
        }
    }

    /// `((x Int) (y clo))`
    pub fn read_binders(&self, e: &SExpr) -> Result<Vec<(String, Sort)>, IoError> {
        let items = e.list().ok_or_else(|| e.error("expected a binder list"))?;
        items
            .iter()
            .map(|b| match b.list() {
                Some([SExpr::Atom(name, _), s]) => Ok((name.clone(), self.read_sort(s)?)),
                _ => Err(b.error(format!("malformed binder {b}"))),
            })
            .collect()
    }

    fn int_const(e: &SExpr) -> Option<i128> {
        match e {
            SExpr::Atom(a, _) => a.parse().ok(),
            SExpr::List(..) => match e.call() {
                Some(("-", [x])) => Self::int_const(x).map(|k| -k),
                _ => None,
            },
        }
    }

    pub fn read_lin(&self, e: &SExpr) -> Result<LinExpr, IoError> {
        if let Some(k) = Self::int_const(e) {
            return Ok(LinExpr::constant(k));
        }
        if let Some(a) = e.atom() {
            return match self.vars.get(a) {
                Some(Sort::Int) => Ok(LinExpr::var(a)),
                Some(s) => Err(e.error(format!("{a} has sort {s}, expected Int"))),
                None => Err(e.error(format!("unbound variable {a}"))),
            };
        }
        let (op, args) = e.call().ok_or_else(|| e.error("malformed arithmetic term"))?;
        let lins = || args.iter().map(|a| self.read_lin(a)).collect::<Result<Vec<_>, _>>();
        match (op, args.len()) {
            ("+", _) => Ok(lins()?.iter().fold(LinExpr::zero(), |acc, x| acc.add(x))),
            ("-", 1) => Ok(self.read_lin(&args[0])?.scale(-1)),
            ("-", n) if n >= 2 => {
                let ls = lins()?;
                Ok(ls[1..].iter().fold(ls[0].clone(), |acc, x| acc.sub(x)))
            }
            ("*", _) => {
                let ls = lins()?;
                let mut k = 1i128;
                let mut var_part: Option<LinExpr> = None;
                for l in ls {
                    match l.as_constant() {
                        Some(c) => k *= c,
                        None if var_part.is_none() => var_part = Some(l),
                        None => return Err(e.error("nonlinear multiplication")),
                    }
                }
                Ok(var_part.map(|v| v.scale(k)).unwrap_or_else(|| LinExpr::constant(k)))
            }
            _ => Err(e.error(format!("unsupported arithmetic operator {op}"))),
        }
    }

    pub fn read_term(&self, e: &SExpr) -> Result<(Term, Sort), IoError> {
        if let Some(a) = e.atom() {
            match a {
                "true" => return Ok((Term::Bool(true), Sort::Bool)),
                "false" => return Ok((Term::Bool(false), Sort::Bool)),
                "unit" if self.sys.ctor("unit").is_none() => return Ok((Term::Unit, Sort::Unit)),
                _ => {}
            }
            if let Some(s) = self.vars.get(a) {
                return Ok((Term::var_of(a, s), s.clone()));
            }
            if let Some((d, c)) = self.sys.ctor(a) {
                if c.fields.is_empty() {
                    return Ok((Term::Ctor(a.into(), Vec::new()), Sort::Adt(d.name.clone())));
                }
            }
        }
        if let Some((c, args)) = e.call() {
            if let Some((d, ctor)) = self.sys.ctor(c) {
                if ctor.fields.len() != args.len() {
                    return Err(e.error(format!("{c} expects {} arguments", ctor.fields.len())));
                }
                let mut ts = Vec::new();
                for (a, s) in args.iter().zip(&ctor.fields) {
                    let (t, ts_sort) = self.read_term(a)?;
                    if &ts_sort != s {
                        return Err(a.error(format!("expected {s}, found {ts_sort}")));
                    }
                    ts.push(t);
                }
                return Ok((Term::Ctor(c.into(), ts), Sort::Adt(d.name.clone())));
            }
        }
        Ok((Term::Int(self.read_lin(e)?), Sort::Int))
    }

    fn term_sort_hint(&self, e: &SExpr) -> Option<Sort> {
        self.read_term(e).ok().map(|(_, s)| s)
    }

    pub fn read_formula(&self, e: &SExpr) -> Result<Formula, IoError> {
        if let Some(a) = e.atom() {
            return match a {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                _ => match self.vars.get(a) {
                    Some(Sort::Bool) => Ok(Formula::bool_var(a, true)),
                    _ => Err(e.error(format!("{a} is not a Boolean"))),
                },
            };
        }
        let (op, args) = e.call().ok_or_else(|| e.error("malformed formula"))?;
        let fs = || args.iter().map(|a| self.read_formula(a)).collect::<Result<Vec<_>, _>>();
        let cmp = |o: CmpOp| -> Result<Formula, IoError> {
            if args.len() != 2 {
                return Err(e.error(format!("{op} takes two arguments")));
            }
            Ok(Formula::cmp(&self.read_lin(&args[0])?, o, &self.read_lin(&args[1])?))
        };
        match op {
            "and" => Ok(Formula::and(fs()?)),
            "or" => Ok(Formula::or(fs()?)),
            "not" if args.len() == 1 => Ok(self.read_formula(&args[0])?.negate()),
            "=>" if args.len() >= 2 => {
                let mut parts = fs()?;
                let mut acc = parts.pop().unwrap();
                while let Some(p) = parts.pop() {
                    acc = Formula::implies(p, acc);
                }
                Ok(acc)
            }
            "ite" if args.len() == 3 => {
                let c = self.read_formula(&args[0])?;
                let (a, b) = (self.read_formula(&args[1])?, self.read_formula(&args[2])?);
                Ok(Formula::or([Formula::and([c.clone(), a]), Formula::and([c.negate(), b])]))
            }
            "=" | "distinct" if args.len() == 2 => {
                let eq = match self.term_sort_hint(&args[0]).or_else(|| self.term_sort_hint(&args[1])) {
                    Some(Sort::Bool) => Formula::iff(self.read_formula(&args[0])?, self.read_formula(&args[1])?),
                    Some(Sort::Int) | None => cmp(CmpOp::Eq)?,
                    Some(_) => {
                        let (a, sa) = self.read_term(&args[0])?;
                        let (b, sb) = self.read_term(&args[1])?;
                        if sa != sb {
                            return Err(e.error(format!("comparing {sa} with {sb}")));
                        }
                        Formula::term_eq(a, b, true)
                    }
                };
                Ok(if op == "=" { eq } else { eq.negate() })
            }
            "<=" => cmp(CmpOp::Le),
            "<" => cmp(CmpOp::Lt),
            ">=" => cmp(CmpOp::Ge),
            ">" => cmp(CmpOp::Gt),
            _ if self.sys.pred(op).is_some() => Err(e.error(format!("predicate {op} in constraint position"))),
            _ => Err(e.error(format!("unsupported formula {e}"))),
        }
    }
}
