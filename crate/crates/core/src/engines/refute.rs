//! Bounded bottom-up search for counterexample derivations.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use serde::Serialize;
use thiserror::Error;

use super::lia::{Lia, LiaResult, DEFAULT_BUDGET};
use super::value::{complete, eval_formula, eval_term, Assignment};
use crate::horn::{Clause, Formula, Head, HornSystem, PredApp, Sort, Term};

/// A tree of clause instances rooted at a goal clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub clause: usize,
    pub assignment: Assignment,
    pub children: Vec<Derivation>,
}

impl Derivation {
    /// Leaves have height 1.
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(Derivation::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Derivation::size).sum::<usize>()
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, s: Option<&HornSystem>, depth: usize) -> fmt::Result {
        write!(f, "{:indent$}clause {}", "", self.clause, indent = depth * 2)?;
        if let Some(Head::Pred(h)) = s.and_then(|s| s.clauses.get(self.clause)).map(|c| &c.head) {
            let args: Vec<String> =
                h.args.iter().map(|t| eval_term(t, &self.assignment).map_or("?".into(), |v| v.to_string())).collect();
            write!(f, " ⊢ {}({})", h.pred, args.join(", "))?;
        }
        if !self.assignment.is_empty() {
            let vals: Vec<String> = self.assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, " [{}]", vals.join(" "))?;
        }
        writeln!(f)?;
        for c in &self.children {
            c.fmt_indented(f, s, depth + 1)?;
        }
        Ok(())
    }

    /// Indented rendering showing derived facts.
    pub fn display<'a>(&'a self, s: &'a HornSystem) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Derivation, &'a HornSystem);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_indented(f, Some(self.1), 0)
            }
        }
        D(self, s)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, None, 0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("root clause {0} is not a goal")]
    NotGoal(usize),
    #[error("no clause {0}")]
    UnknownClause(usize),
    #[error("clause {clause}: variable {var} unassigned or ill-sorted")]
    Unassigned { clause: usize, var: String },
    #[error("clause {0}: constraint does not hold")]
    Constraint(usize),
    #[error("clause {clause}: expected {expected} children, found {found}")]
    Arity { clause: usize, expected: usize, found: usize },
    #[error("clause {clause}: body atom {atom} does not match its child's head")]
    Mismatch { clause: usize, atom: usize },
}

fn replay_node(s: &HornSystem, d: &Derivation) -> Result<(), ReplayError> {
    let c = s.clauses.get(d.clause).ok_or(ReplayError::UnknownClause(d.clause))?;
    for (v, _) in &c.vars {
        if !d.assignment.contains_key(v) {
            return Err(ReplayError::Unassigned { clause: d.clause, var: v.clone() });
        }
    }
    if eval_formula(&c.constraint, &d.assignment) != Some(true) {
        return Err(ReplayError::Constraint(d.clause));
    }
    if c.body.len() != d.children.len() {
        return Err(ReplayError::Arity { clause: d.clause, expected: c.body.len(), found: d.children.len() });
    }
    for (i, (atom, child)) in c.body.iter().zip(&d.children).enumerate() {
        let cc = s.clauses.get(child.clause).ok_or(ReplayError::UnknownClause(child.clause))?;
        let Head::Pred(h) = &cc.head else { return Err(ReplayError::Mismatch { clause: d.clause, atom: i }) };
        if h.pred != atom.pred || atom.is_quantified() || h.is_quantified() {
            return Err(ReplayError::Mismatch { clause: d.clause, atom: i });
        }
        for (a, b) in atom.args.iter().zip(&h.args) {
            let va = eval_term(a, &d.assignment);
            if va.is_none() || va != eval_term(b, &child.assignment) {
                return Err(ReplayError::Mismatch { clause: d.clause, atom: i });
            }
        }
        replay_node(s, child)?;
    }
    Ok(())
}

/// Re-verifies every node of a counterexample derivation.
pub fn replay(s: &HornSystem, d: &Derivation) -> Result<(), ReplayError> {
    match s.clauses.get(d.clause) {
        None => Err(ReplayError::UnknownClause(d.clause)),
        Some(c) if !c.is_goal() => Err(ReplayError::NotGoal(d.clause)),
        Some(_) => replay_node(s, d),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Refutation {
    Unsat(Derivation),
    /// No derivation of the requested height; `exhausted` is set when the
    /// search was cut short by a budget, so the answer is inconclusive.
    NoneFound {
        exhausted: bool,
    },
}

#[derive(Debug)]
struct Node {
    clause: usize,
    renaming: BTreeMap<String, String>,
    children: Vec<Rc<Node>>,
}

/// A derivable atom `pred(args)` under `store`, variables renamed apart.
#[derive(Debug, Clone)]
pub struct SymbolicFact {
    pub pred: String,
    pub args: Vec<Term>,
    pub store: Formula,
    pub sorts: BTreeMap<String, Sort>,
    pub height: usize,
    node: Rc<Node>,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub lia_budget: usize,
    /// Maximum number of clause instances tried.
    pub max_steps: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { lia_budget: DEFAULT_BUDGET, max_steps: 20_000 }
    }
}

struct Search<'a> {
    s: &'a HornSystem,
    limits: SearchLimits,
    fresh: usize,
    steps: usize,
    exhausted: bool,
}

fn rename_node(n: &Node, map: &BTreeMap<String, String>) -> Rc<Node> {
    Rc::new(Node {
        clause: n.clause,
        renaming: n
            .renaming
            .iter()
            .map(|(k, v)| (k.clone(), map.get(v).cloned().unwrap_or_else(|| v.clone())))
            .collect(),
        children: n.children.iter().map(|c| rename_node(c, map)).collect(),
    })
}

fn equate(a: &Term, b: &Term, sort: &Sort) -> Formula {
    match sort {
        Sort::Int => Formula::cmp(a.as_lin().unwrap(), crate::horn::CmpOp::Eq, b.as_lin().unwrap()),
        Sort::Bool => Formula::iff(Formula::of_bool_term(a), Formula::of_bool_term(b)),
        _ => Formula::term_eq(a.clone(), b.clone(), true),
    }
}

impl<'a> Search<'a> {
    fn rename_fact(&mut self, f: &SymbolicFact) -> SymbolicFact {
        let map: BTreeMap<String, String> = f
            .sorts
            .keys()
            .map(|v| {
                self.fresh += 1;
                let base = v.split('~').next().unwrap_or(v);
                (v.clone(), format!("{base}~{}", self.fresh))
            })
            .collect();
        let ren = |v: &str| map.get(v).cloned().unwrap_or_else(|| v.to_string());
        SymbolicFact {
            pred: f.pred.clone(),
            args: f.args.iter().map(|t| t.rename(&ren)).collect(),
            store: f.store.rename(&ren),
            sorts: f.sorts.iter().map(|(k, s)| (map[k].clone(), s.clone())).collect(),
            height: f.height,
            node: rename_node(&f.node, &map),
        }
    }

    /// Instantiates clause `idx` with the given body facts; `None` when the
    /// combined store is unsatisfiable.
    fn combine(&mut self, idx: usize, facts: &[&SymbolicFact]) -> Option<(SymbolicFact, Option<Assignment>)> {
        self.steps += 1;
        if self.steps > self.limits.max_steps {
            self.exhausted = true;
            return None;
        }
        let c: &Clause = &self.s.clauses[idx];
        self.fresh += 1;
        let tag = self.fresh;
        let renaming: BTreeMap<String, String> =
            c.vars.iter().map(|(v, _)| (v.clone(), format!("{v}~{tag}"))).collect();
        let ren = |v: &str| renaming.get(v).cloned().unwrap_or_else(|| v.to_string());
        let mut sorts: BTreeMap<String, Sort> = c.vars.iter().map(|(v, s)| (renaming[v].clone(), s.clone())).collect();
        let mut store = vec![c.constraint.rename(&ren)];
        let mut children = Vec::new();
        let mut height = 0;
        for (atom, fact) in c.body.iter().zip(facts) {
            let fact = self.rename_fact(fact);
            let decl = self.s.pred(&atom.pred).expect("declared predicate");
            for ((a, b), srt) in atom.args.iter().zip(&fact.args).zip(&decl.sorts) {
                store.push(equate(&a.rename(&ren), b, srt));
            }
            store.push(fact.store.clone());
            sorts.extend(fact.sorts.clone());
            height = height.max(fact.height);
            children.push(fact.node.clone());
        }
        let store = Formula::and(store);
        if store == Formula::False {
            return None;
        }
        let lia = Lia::in_context(self.s, &sorts, self.limits.lia_budget);
        let witness = match lia.sat(&store) {
            LiaResult::Unsat => return None,
            LiaResult::Sat(a) => Some(a),
            LiaResult::Unknown(_) => {
                self.exhausted = true;
                None
            }
        };
        let (pred, args) = match &c.head {
            Head::Pred(h) => (h.pred.clone(), h.args.iter().map(|t| t.rename(&ren)).collect()),
            Head::False => (String::new(), Vec::new()),
        };
        let node = Rc::new(Node { clause: idx, renaming, children });
        Some((SymbolicFact { pred, args, store, sorts, height: height + 1, node }, witness))
    }

    /// All clause instances whose body facts come from `levels` with the
    /// tallest exactly at `top` (1-based heights; `top = 0` means no body).
    fn instances(
        &mut self,
        levels: &[Vec<SymbolicFact>],
        top: usize,
        goals: bool,
    ) -> Vec<(SymbolicFact, Option<Assignment>)> {
        let mut out = Vec::new();
        for idx in 0..self.s.clauses.len() {
            let c = &self.s.clauses[idx];
            if c.is_goal() != goals || c.atoms().any(PredApp::is_quantified) {
                continue;
            }
            if top == 0 {
                if c.body.is_empty() {
                    out.extend(self.combine(idx, &[]));
                }
                continue;
            }
            if c.body.is_empty() {
                continue;
            }
            let pools: Vec<Vec<&SymbolicFact>> =
                c.body.iter().map(|a| levels[..top].iter().flatten().filter(|f| f.pred == a.pred).collect()).collect();
            let body_len = c.body.len();
            let mut choice = vec![0usize; body_len];
            if pools.iter().any(Vec::is_empty) {
                continue;
            }
            'odometer: loop {
                let picked: Vec<&SymbolicFact> = choice.iter().zip(&pools).map(|(&i, p)| p[i]).collect();
                if picked.iter().any(|f| f.height == top) {
                    if let Some(r) = self.combine(idx, &picked) {
                        out.push(r);
                        if goals && out.last().unwrap().1.is_some() {
                            return out;
                        }
                    }
                    if self.exhausted && self.steps > self.limits.max_steps {
                        return out;
                    }
                }
                for k in 0..body_len {
                    choice[k] += 1;
                    if choice[k] < pools[k].len() {
                        continue 'odometer;
                    }
                    choice[k] = 0;
                }
                break;
            }
        }
        out
    }
}

fn build(node: &Node, a: &Assignment) -> Derivation {
    Derivation {
        clause: node.clause,
        assignment: node.renaming.iter().filter_map(|(v, r)| a.get(r).map(|x| (v.clone(), x.clone()))).collect(),
        children: node.children.iter().map(|c| build(c, a)).collect(),
    }
}

/// Searches for a goal derivation whose body subtrees have height ≤ `depth`.
pub fn bounded_refutation(s: &HornSystem, depth: usize) -> Refutation {
    bounded_refutation_with(s, depth, SearchLimits::default())
}

pub fn bounded_refutation_with(s: &HornSystem, depth: usize, limits: SearchLimits) -> Refutation {
    let mut search = Search { s, limits, fresh: 0, steps: 0, exhausted: false };
    let mut levels: Vec<Vec<SymbolicFact>> = Vec::new();
    for d in 0..=depth {
        for (goal, witness) in search.instances(&levels, d, true) {
            if let Some(mut a) = witness {
                complete(&mut a, &goal.sorts.iter().map(|(k, v)| (k.clone(), v.clone())).collect::<Vec<_>>(), s);
                let der = build(&goal.node, &a);
                debug_assert_eq!(replay(s, &der), Ok(()));
                return Refutation::Unsat(der);
            }
        }
        if d == depth || search.exhausted {
            break;
        }
        let next: Vec<SymbolicFact> = search.instances(&levels, d, false).into_iter().map(|(f, _)| f).collect();
        if next.is_empty() {
            // Nothing new can be derived at any greater height.
            break;
        }
        levels.push(next);
    }
    Refutation::NoneFound { exhausted: search.exhausted }
}

/// Symbolic facts derivable by trees of height ≤ `depth`, plus whether the
/// enumeration was cut short.
pub fn derivable_facts(s: &HornSystem, depth: usize, limits: SearchLimits) -> (Vec<SymbolicFact>, bool) {
    let mut search = Search { s, limits, fresh: 0, steps: 0, exhausted: false };
    let mut levels: Vec<Vec<SymbolicFact>> = Vec::new();
    for d in 0..depth {
        let next: Vec<SymbolicFact> = search.instances(&levels, d, false).into_iter().map(|(f, _)| f).collect();
        levels.push(next);
        if search.exhausted {
            break;
        }
    }
    (levels.into_iter().flatten().collect(), search.exhausted)
}
