use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::formula::Formula;
use super::system::HornSystem;
use super::term::{Sort, Subst, Term};

/// One constructor test `param = ctor(binders…)` inside a case pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternElem {
    pub param: usize,
    pub ctor: String,
    pub binders: Vec<String>,
}

/// A guarded case; an empty pattern is the default `_`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Case {
    pub pattern: Vec<PatternElem>,
    pub body: Formula,
}

/// Interpretation of one predicate: cases tried in order, first match wins.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interp {
    pub params: Vec<(String, Sort)>,
    pub cases: Vec<Case>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub interps: BTreeMap<String, Interp>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("model has no interpretation for predicate {0}")]
    MissingPredicate(String),
    #[error("interpretation of {pred} has {found} parameters, expected {expected}")]
    Arity { pred: String, expected: usize, found: usize },
    #[error("cases of {0} are not exhaustive")]
    NonExhaustive(String),
    #[error("unsupported model shape: {0}")]
    Unsupported(String),
}

/// Result of applying an interpretation to argument terms.
#[derive(Debug, Clone, PartialEq)]
pub enum Applied {
    Formula(Formula),
    /// Case selection depends on the constructor of this variable.
    Split(String),
}

impl Interp {
    pub fn constant(params: Vec<(String, Sort)>, value: bool) -> Interp {
        Interp { params, cases: vec![Case { pattern: Vec::new(), body: Formula::from_bool(value) }] }
    }

    pub fn single(params: Vec<(String, Sort)>, body: Formula) -> Interp {
        Interp { params, cases: vec![Case { pattern: Vec::new(), body }] }
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn param_term(&self, i: usize) -> Term {
        let (name, sort) = &self.params[i];
        Term::var_of(name.clone(), sort)
    }

    pub fn param_terms(&self) -> Vec<Term> {
        (0..self.params.len()).map(|i| self.param_term(i)).collect()
    }

    /// Instantiates the interpretation at `args`.
    pub fn apply(&self, args: &[Term], sys: &HornSystem) -> Result<Applied, ModelError> {
        for case in &self.cases {
            let mut binding: Subst = BTreeMap::new();
            let mut matched = true;
            for el in &case.pattern {
                match &args[el.param] {
                    Term::Ctor(c, sub) if *c == el.ctor => {
                        let (_, ctor) =
                            sys.ctor(c).ok_or_else(|| ModelError::Unsupported(format!("unknown constructor {c}")))?;
                        for ((b, t), s) in el.binders.iter().zip(sub).zip(&ctor.fields) {
                            let t = match (s, t) {
                                (Sort::Int, Term::Int(_)) => t.clone(),
                                (Sort::Int, other) => {
                                    return Err(ModelError::Unsupported(format!("bad Int field {other}")))
                                }
                                _ => t.clone(),
                            };
                            binding.insert(b.clone(), t);
                        }
                    }
                    Term::Ctor(..) => {
                        matched = false;
                        break;
                    }
                    Term::Var(v) => return Ok(Applied::Split(v.clone())),
                    other => return Err(ModelError::Unsupported(format!("non-constructor ADT argument {other}"))),
                }
            }
            if matched {
                for (i, (p, _)) in self.params.iter().enumerate() {
                    binding.insert(p.clone(), args[i].clone());
                }
                return Ok(Applied::Formula(case.body.subst(&binding)));
            }
        }
        Err(ModelError::NonExhaustive(format!("{self}")))
    }

    /// `B(params) := target(args)` where `args` are terms over `params` and
    /// the binders of `extra` (constructor tests added in front of every case).
    pub fn pullback(
        params: Vec<(String, Sort)>,
        extra: Vec<PatternElem>,
        target: &Interp,
        args: &[Term],
        conj: Formula,
    ) -> Result<Interp, ModelError> {
        let index: BTreeMap<&str, usize> = params.iter().enumerate().map(|(i, (n, _))| (n.as_str(), i)).collect();
        let mut cases = Vec::new();
        for (ci, case) in target.cases.iter().enumerate() {
            let mut pattern = extra.clone();
            let mut binding: Subst = BTreeMap::new();
            for el in &case.pattern {
                let arg = &args[el.param];
                let Some(v) = arg.as_var() else {
                    return Err(ModelError::Unsupported(format!("pattern on non-variable argument {arg}")));
                };
                let Some(&pi) = index.get(v) else {
                    return Err(ModelError::Unsupported(format!("nested pattern through {v}")));
                };
                // binders renamed to stay clear of the new parameters
                let binders: Vec<String> = el
                    .binders
                    .iter()
                    .map(|b| {
                        let fresh = format!("{b}_{ci}");
                        binding.insert(b.clone(), Term::Var(fresh.clone()));
                        fresh
                    })
                    .collect();
                pattern.push(PatternElem { param: pi, ctor: el.ctor.clone(), binders });
            }
            for (i, (p, _)) in target.params.iter().enumerate() {
                binding.insert(p.clone(), args[i].clone());
            }
            let body = fix_binder_sorts(&case.body, &binding, case);
            cases.push(Case { pattern, body: Formula::and([body, conj.clone()]) });
        }
        Ok(Interp { params, cases })
    }

    /// Pointwise combination of two interpretations over the same parameters.
    pub fn combine(a: &Interp, b: &Interp, f: impl Fn(Formula, Formula) -> Formula) -> Interp {
        let mut cases = Vec::new();
        for ca in &a.cases {
            for cb in &b.cases {
                let mut pattern = ca.pattern.clone();
                let mut rename: Subst = BTreeMap::new();
                let mut compatible = true;
                for el in &cb.pattern {
                    match pattern.iter().find(|p| p.param == el.param) {
                        Some(p) if p.ctor != el.ctor => {
                            compatible = false;
                            break;
                        }
                        Some(p) => {
                            for (x, y) in el.binders.iter().zip(&p.binders) {
                                rename.insert(x.clone(), Term::Var(y.clone()));
                            }
                        }
                        None => pattern.push(el.clone()),
                    }
                }
                if !compatible {
                    continue;
                }
                let body_b = rename_binders(&cb.body, &rename);
                cases.push(Case { pattern, body: f(ca.body.clone(), body_b) });
            }
        }
        Interp { params: a.params.clone(), cases }
    }
}

// Binder variables may be Int-sorted; a plain Term::Var rename would turn
// linear atoms into garbage, so rename through the formula's own renamer.
fn rename_binders(f: &Formula, rename: &Subst) -> Formula {
    let map: BTreeMap<String, String> =
        rename.iter().filter_map(|(k, v)| v.as_var().map(|w| (k.clone(), w.to_string()))).collect();
    f.rename(&|v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_string()))
}

fn fix_binder_sorts(body: &Formula, binding: &Subst, case: &Case) -> Formula {
    // Binder renames are recorded as Term::Var; split them off and apply as
    // pure renames so Int binders stay linear.
    let binder_names: Vec<&String> = case.pattern.iter().flat_map(|e| e.binders.iter()).collect();
    let renames: Subst =
        binding.iter().filter(|(k, _)| binder_names.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect();
    let rest: Subst =
        binding.iter().filter(|(k, _)| !binder_names.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect();
    // params never share names with binders, so the two steps commute
    rename_binders(body, &renames).subst(&rest)
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every predicate of `sys` interpreted as the constant `value`.
    pub fn constant(sys: &HornSystem, value: bool) -> Model {
        let mut m = Model::new();
        for p in &sys.preds {
            m.interps.insert(p.name.clone(), Interp::constant(default_params(&p.sorts), value));
        }
        m
    }

    pub fn get(&self, pred: &str) -> Option<&Interp> {
        self.interps.get(pred)
    }

    pub fn insert(&mut self, pred: impl Into<String>, interp: Interp) {
        self.interps.insert(pred.into(), interp);
    }
}

/// Parameter names `a0, a1, …` for a signature.
pub fn default_params(sorts: &[Sort]) -> Vec<(String, Sort)> {
    sorts.iter().enumerate().map(|(i, s)| (format!("a{i}"), s.clone())).collect()
}

impl fmt::Display for Interp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (p, _)) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ") ≡ ")?;
        if self.cases.len() == 1 && self.cases[0].pattern.is_empty() {
            return write!(f, "{}", self.cases[0].body);
        }
        write!(f, "case")?;
        for c in &self.cases {
            write!(f, " | ")?;
            if c.pattern.is_empty() {
                write!(f, "_")?;
            }
            for (i, el) in c.pattern.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{} = {}", self.params[el.param].0, el.ctor)?;
                if !el.binders.is_empty() {
                    write!(f, "({})", el.binders.join(", "))?;
                }
            }
            write!(f, " → {}", c.body)?;
        }
        Ok(())
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, i) in &self.interps {
            writeln!(f, "{p}{i}")?;
        }
        Ok(())
    }
}
