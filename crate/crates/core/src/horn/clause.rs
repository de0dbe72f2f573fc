use std::collections::BTreeMap;
use std::fmt;

use super::formula::Formula;
use super::term::{Sort, Subst, Term};

/// A predicate application. `bound` lists per-atom universally quantified
/// integer variables (quantified abstraction); it is empty for ordinary atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredApp {
    pub pred: String,
    pub args: Vec<Term>,
    pub bound: Vec<String>,
}

impl PredApp {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        PredApp { pred: pred.into(), args, bound: Vec::new() }
    }

    pub fn is_quantified(&self) -> bool {
        !self.bound.is_empty()
    }

    /// Free variables in first-occurrence order.
    pub fn collect_vars(&self, out: &mut Vec<String>) {
        let mut local = Vec::new();
        for a in &self.args {
            a.collect_vars(&mut local);
        }
        for v in local {
            if !self.bound.contains(&v) && !out.contains(&v) {
                out.push(v);
            }
        }
    }

    pub fn subst(&self, s: &Subst) -> PredApp {
        if self.bound.is_empty() {
            return PredApp {
                pred: self.pred.clone(),
                args: self.args.iter().map(|a| a.subst(s)).collect(),
                bound: Vec::new(),
            };
        }
        // Bound variables shadow the substitution; rename them away from
        // anything the substitution introduces.
        let mut introduced = Vec::new();
        for t in s.values() {
            t.collect_vars(&mut introduced);
        }
        let mut inner: Subst =
            s.iter().filter(|(k, _)| !self.bound.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut bound = Vec::new();
        for b in &self.bound {
            if introduced.contains(b) {
                let mut fresh = format!("{b}'");
                while introduced.contains(&fresh) || self.bound.contains(&fresh) {
                    fresh.push('\'');
                }
                inner.insert(b.clone(), Term::int_var(fresh.clone()));
                bound.push(fresh);
            } else {
                bound.push(b.clone());
            }
        }
        PredApp { pred: self.pred.clone(), args: self.args.iter().map(|a| a.subst(&inner)).collect(), bound }
    }

    pub fn rename(&self, f: &impl Fn(&str) -> String) -> PredApp {
        let bound = self.bound.clone();
        let g = |v: &str| if bound.iter().any(|b| b == v) { v.to_string() } else { f(v) };
        PredApp {
            pred: self.pred.clone(),
            args: self.args.iter().map(|a| a.rename(&g)).collect(),
            bound: self.bound.clone(),
        }
    }

    pub fn mentions_ctor(&self, ctor: &str) -> bool {
        self.args.iter().any(|a| a.mentions_ctor(ctor))
    }
}

impl fmt::Display for PredApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.bound.is_empty() {
            write!(f, "(∀ {}. ", self.bound.join(" "))?;
        }
        write!(f, "{}(", self.pred)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")?;
        if !self.bound.is_empty() {
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Pred(PredApp),
    False,
}

impl Head {
    pub fn as_pred(&self) -> Option<&PredApp> {
        match self {
            Head::Pred(p) => Some(p),
            Head::False => None,
        }
    }

    pub fn pred_name(&self) -> Option<&str> {
        self.as_pred().map(|p| p.pred.as_str())
    }
}

/// `∀ vars. body₁ ∧ … ∧ bodyₙ ∧ constraint → head`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub vars: Vec<(String, Sort)>,
    pub body: Vec<PredApp>,
    pub constraint: Formula,
    pub head: Head,
}

impl Clause {
    /// Builds a clause whose quantifier list is recomputed from the atoms,
    /// taking sorts from `sorts`. Panics if a variable has no sort.
    pub fn build(sorts: &BTreeMap<String, Sort>, body: Vec<PredApp>, constraint: Formula, head: Head) -> Clause {
        let mut c = Clause { vars: Vec::new(), body, constraint, head };
        let names = c.free_vars();
        c.vars = names
            .into_iter()
            .map(|v| {
                let s = sorts.get(&v).unwrap_or_else(|| panic!("no sort for variable {v}")).clone();
                (v, s)
            })
            .collect();
        c
    }

    pub fn is_goal(&self) -> bool {
        matches!(self.head, Head::False)
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn sort_of(&self, var: &str) -> Option<&Sort> {
        self.vars.iter().find(|(v, _)| v == var).map(|(_, s)| s)
    }

    pub fn sort_map(&self) -> BTreeMap<String, Sort> {
        self.vars.iter().cloned().collect()
    }

    /// Free variables: body atoms, constraint, head, in that order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        for b in &self.body {
            b.collect_vars(&mut out);
        }
        self.constraint.collect_vars(&mut out);
        if let Head::Pred(h) = &self.head {
            h.collect_vars(&mut out);
        }
        out
    }

    /// Recomputes the quantifier list from the free variables, keeping known
    /// sorts and consulting `extra` for variables introduced since.
    pub fn refresh_vars(&mut self, extra: &BTreeMap<String, Sort>) {
        let known = self.sort_map();
        let names = self.free_vars();
        self.vars = names
            .into_iter()
            .map(|v| {
                let s = known
                    .get(&v)
                    .or_else(|| extra.get(&v))
                    .unwrap_or_else(|| panic!("no sort for variable {v}"))
                    .clone();
                (v, s)
            })
            .collect();
    }

    /// Simultaneous substitution without sort checking.
    pub fn subst_unchecked(&self, s: &Subst, extra: &BTreeMap<String, Sort>) -> Clause {
        let mut c = Clause {
            vars: self.vars.clone(),
            body: self.body.iter().map(|b| b.subst(s)).collect(),
            constraint: self.constraint.subst(s),
            head: match &self.head {
                Head::Pred(h) => Head::Pred(h.subst(s)),
                Head::False => Head::False,
            },
        };
        c.refresh_vars(extra);
        c
    }

    pub fn rename(&self, f: &impl Fn(&str) -> String) -> Clause {
        Clause {
            vars: self.vars.iter().map(|(v, s)| (f(v), s.clone())).collect(),
            body: self.body.iter().map(|b| b.rename(f)).collect(),
            constraint: self.constraint.rename(f),
            head: match &self.head {
                Head::Pred(h) => Head::Pred(h.rename(f)),
                Head::False => Head::False,
            },
        }
    }

    /// Renames every variable `x` to `x#tag`, keeping clauses apart.
    pub fn rename_apart(&self, tag: usize) -> Clause {
        self.rename(&|v: &str| format!("{v}#{tag}"))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &PredApp> {
        self.body.iter().chain(self.head.as_pred())
    }

    pub fn mentions_ctor(&self, ctor: &str) -> bool {
        self.atoms().any(|a| a.mentions_ctor(ctor)) || self.constraint.mentions_ctor(ctor)
    }

    pub fn mentions_pred(&self, pred: &str) -> bool {
        self.atoms().any(|a| a.pred == pred)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.body.iter().map(|b| b.to_string()).collect();
        match &self.constraint {
            Formula::True => {}
            Formula::Or(_) if !parts.is_empty() => parts.push(format!("({})", self.constraint)),
            other => parts.push(other.to_string()),
        }
        let head = match &self.head {
            Head::Pred(h) => h.to_string(),
            Head::False => "false".to_string(),
        };
        if parts.is_empty() {
            write!(f, "{head}")
        } else {
            write!(f, "{} → {head}", parts.join(" ∧ "))
        }
    }
}
