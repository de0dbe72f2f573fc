use std::collections::BTreeMap;
use std::fmt;

use super::lia::{Lia, Validity, DEFAULT_BUDGET};
use super::value::{complete, Assignment};
use crate::horn::{Applied, Clause, Formula, Head, HornSystem, Model, ModelError, PredApp, Sort, Subst, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Valid,
    /// Clause `clause` fails under `witness`.
    Invalid {
        clause: usize,
        witness: Assignment,
    },
    /// The arithmetic core gave up on `clause`.
    Unknown {
        clause: usize,
        reason: String,
    },
}

impl CheckResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, CheckResult::Valid)
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckResult::Valid => write!(f, "Valid"),
            CheckResult::Invalid { clause, witness } => {
                write!(f, "Invalid: clause {clause} fails at")?;
                for (v, x) in witness {
                    write!(f, " {v}={x}")?;
                }
                Ok(())
            }
            CheckResult::Unknown { clause, reason } => write!(f, "Unknown at clause {clause}: {reason}"),
        }
    }
}

const MAX_SPLITS: usize = 256;

/// Checks that `m` is an inductive model of `s`: every clause, with the
/// interpretations substituted, is a valid implication.
pub fn check_model(s: &HornSystem, m: &Model) -> Result<CheckResult, ModelError> {
    check_model_with_budget(s, m, DEFAULT_BUDGET)
}

pub fn check_model_with_budget(s: &HornSystem, m: &Model, budget: usize) -> Result<CheckResult, ModelError> {
    for p in &s.preds {
        let i = m.get(&p.name).ok_or_else(|| ModelError::MissingPredicate(p.name.clone()))?;
        if i.arity() != p.sorts.len() {
            return Err(ModelError::Arity { pred: p.name.clone(), expected: p.sorts.len(), found: i.arity() });
        }
    }
    for (idx, c) in s.clauses.iter().enumerate() {
        match check_clause(s, m, c, budget)? {
            CheckResult::Valid => {}
            CheckResult::Invalid { witness, .. } => return Ok(CheckResult::Invalid { clause: idx, witness }),
            CheckResult::Unknown { reason, .. } => return Ok(CheckResult::Unknown { clause: idx, reason }),
        }
    }
    Ok(CheckResult::Valid)
}

/// Bound variables of quantified atoms become ordinary (fresh) variables.
fn open_quantifiers(c: &Clause) -> Clause {
    let mut c = c.clone();
    let mut extra = BTreeMap::new();
    let mut n = 0;
    let mut open = |a: &PredApp, extra: &mut BTreeMap<String, Sort>| -> PredApp {
        if a.bound.is_empty() {
            return a.clone();
        }
        let mut s = Subst::new();
        for b in &a.bound {
            n += 1;
            let fresh = format!("{b}!{n}");
            extra.insert(fresh.clone(), Sort::Int);
            s.insert(b.clone(), Term::int_var(fresh));
        }
        let plain = PredApp { pred: a.pred.clone(), args: a.args.clone(), bound: Vec::new() };
        plain.subst(&s)
    };
    c.body = c.body.iter().map(|a| open(a, &mut extra)).collect();
    if let Head::Pred(h) = &c.head {
        c.head = Head::Pred(open(h, &mut extra));
    }
    c.refresh_vars(&extra);
    c
}

fn interp_of(s: &HornSystem, m: &Model, a: &PredApp) -> Result<Applied, ModelError> {
    m.get(&a.pred).ok_or_else(|| ModelError::MissingPredicate(a.pred.clone()))?.apply(&a.args, s)
}

fn check_clause(s: &HornSystem, m: &Model, c: &Clause, budget: usize) -> Result<CheckResult, ModelError> {
    let mut work = vec![open_quantifiers(c)];
    let mut splits = 0;
    let mut fresh = 0;
    'next: while let Some(c) = work.pop() {
        let mut premise = vec![c.constraint.clone()];
        let mut atoms: Vec<&PredApp> = c.body.iter().collect();
        atoms.extend(c.head.as_pred());
        let mut formulas = Vec::new();
        for a in atoms {
            match interp_of(s, m, a)? {
                Applied::Formula(f) => formulas.push(f),
                Applied::Split(v) => {
                    splits += 1;
                    if splits > MAX_SPLITS {
                        return Err(ModelError::Unsupported("too many constructor case splits".into()));
                    }
                    let Some(Sort::Adt(d)) = c.sort_of(&v).cloned() else {
                        return Err(ModelError::Unsupported(format!("pattern on non-data variable {v}")));
                    };
                    let dt = s.datatype(&d).ok_or_else(|| ModelError::Unsupported(format!("unknown datatype {d}")))?;
                    for ctor in &dt.ctors {
                        let mut extra = BTreeMap::new();
                        let args: Vec<Term> = ctor
                            .fields
                            .iter()
                            .map(|fs| {
                                fresh += 1;
                                let n = format!("{v}.{fresh}");
                                extra.insert(n.clone(), fs.clone());
                                Term::var_of(n, fs)
                            })
                            .collect();
                        let mut sub = Subst::new();
                        sub.insert(v.clone(), Term::Ctor(ctor.name.clone(), args));
                        let mut env = c.sort_map();
                        env.extend(extra);
                        work.push(c.subst_unchecked(&sub, &env));
                    }
                    continue 'next;
                }
            }
        }
        let conclusion = match &c.head {
            Head::Pred(_) => formulas.pop().unwrap(),
            Head::False => Formula::False,
        };
        premise.extend(formulas);
        let sorts = c.sort_map();
        let lia = Lia::in_context(s, &sorts, budget);
        match lia.valid(&Formula::and(premise), &conclusion) {
            Validity::Valid => {}
            Validity::Invalid(mut w) => {
                complete(&mut w, &c.vars, s);
                w.retain(|k, _| c.vars.iter().any(|(v, _)| v == k));
                return Ok(CheckResult::Invalid { clause: 0, witness: w });
            }
            Validity::Unknown(reason) => return Ok(CheckResult::Unknown { clause: 0, reason }),
        }
    }
    Ok(CheckResult::Valid)
}
