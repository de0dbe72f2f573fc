//! Satisfiability of quantifier-free formulas over linear integer arithmetic,
//! Bool variables and constructor terms. Disjunctions are split lazily;
//! each cube is solved by unification of constructor terms, substitution of
//! unit-coefficient equalities, Fourier–Motzkin elimination with integer
//! tightening, and branch-and-bound over a node budget.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};

use num::rational::Ratio;
use num::{Integer, Zero};

use super::value::{default_value, eval_term, Assignment, Value};
use crate::horn::{Formula, HornSystem, LinExpr, Rel, Sort, Subst, Term};

pub const DEFAULT_BUDGET: usize = 10_000;

type Q = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiaResult {
    Sat(Assignment),
    Unsat,
    Unknown(String),
}

impl LiaResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, LiaResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, LiaResult::Unsat)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// A counterexample: satisfies the premise, falsifies the conclusion.
    Invalid(Assignment),
    Unknown(String),
}

/// Solver configuration. `sys` and `sorts` let witnesses give values to
/// variables of data sorts that the formula leaves unconstrained.
#[derive(Debug, Clone, Copy)]
pub struct Lia<'a> {
    pub budget: usize,
    pub sys: Option<&'a HornSystem>,
    pub sorts: Option<&'a BTreeMap<String, Sort>>,
}

impl Default for Lia<'_> {
    fn default() -> Self {
        Lia { budget: DEFAULT_BUDGET, sys: None, sorts: None }
    }
}

pub fn lia_sat(f: &Formula) -> LiaResult {
    Lia::default().sat(f)
}

/// True iff every integer assignment satisfying `premise` satisfies `conclusion`.
/// Budget exhaustion counts as not proven.
pub fn lia_valid(premise: &Formula, conclusion: &Formula) -> bool {
    Lia::default().valid(premise, conclusion) == Validity::Valid
}

/// `f` with the given Bool variables fixed.
fn assume(f: &Formula, bools: &BTreeMap<String, bool>) -> Formula {
    match f {
        Formula::Bool(v, p) => match bools.get(v) {
            Some(b) => Formula::from_bool(b == p),
            None => f.clone(),
        },
        Formula::And(ps) => Formula::and(ps.iter().map(|p| assume(p, bools))),
        Formula::Or(ps) => Formula::or(ps.iter().map(|p| assume(p, bools))),
        _ => f.clone(),
    }
}

enum Cube {
    Done(LiaResult),
    Split(Vec<Formula>, Formula),
}

impl<'a> Lia<'a> {
    pub fn with_budget(budget: usize) -> Self {
        Lia { budget, ..Lia::default() }
    }

    pub fn in_context(sys: &'a HornSystem, sorts: &'a BTreeMap<String, Sort>, budget: usize) -> Self {
        Lia { budget, sys: Some(sys), sorts: Some(sorts) }
    }

    pub fn sat(&self, f: &Formula) -> LiaResult {
        let nodes = Cell::new(0usize);
        self.search(vec![f.clone()], Vec::new(), &nodes)
    }

    pub fn valid(&self, premise: &Formula, conclusion: &Formula) -> Validity {
        match self.sat(&Formula::and([premise.clone(), conclusion.negate()])) {
            LiaResult::Unsat => Validity::Valid,
            LiaResult::Sat(a) => Validity::Invalid(a),
            LiaResult::Unknown(why) => Validity::Unknown(why),
        }
    }

    fn search(&self, mut todo: Vec<Formula>, mut lits: Vec<Formula>, nodes: &Cell<usize>) -> LiaResult {
        let mut ors: Vec<Vec<Formula>> = Vec::new();
        let mut bools: BTreeMap<String, bool> = BTreeMap::new();
        loop {
            while let Some(f) = todo.pop() {
                match f {
                    Formula::True => {}
                    Formula::False => return LiaResult::Unsat,
                    Formula::And(ps) => todo.extend(ps),
                    Formula::Or(ps) => ors.push(ps),
                    Formula::Bool(v, p) => {
                        if bools.insert(v.clone(), p).is_some_and(|q| q != p) {
                            return LiaResult::Unsat;
                        }
                        lits.push(Formula::Bool(v, p));
                    }
                    lit => lits.push(lit),
                }
            }
            // Unit propagation over the Bool literals seen so far.
            let mut progressed = false;
            for ps in std::mem::take(&mut ors) {
                let alive: Vec<Formula> =
                    ps.iter().map(|p| assume(p, &bools)).filter(|p| *p != Formula::False).collect();
                match alive.len() {
                    0 => return LiaResult::Unsat,
                    1 => {
                        todo.extend(alive);
                        progressed = true;
                    }
                    _ if alive.contains(&Formula::True) => progressed = true,
                    _ => ors.push(alive),
                }
            }
            if !progressed {
                break;
            }
        }
        if ors.is_empty() {
            return match self.cube(&lits, nodes) {
                Cube::Done(r) => r,
                Cube::Split(rest, f) => self.search(vec![f], rest, nodes),
            };
        }
        // Prune before branching: an inconsistent prefix kills every branch.
        if let Cube::Done(LiaResult::Unsat) = self.cube(&lits, nodes) {
            return LiaResult::Unsat;
        }
        let pick = (0..ors.len()).min_by_key(|&i| ors[i].len()).unwrap();
        let branch = ors.swap_remove(pick);
        let rest: Vec<Formula> = ors.into_iter().map(Formula::Or).collect();
        let mut unknown = None;
        for p in branch {
            let mut t = rest.clone();
            t.push(p);
            match self.search(t, lits.clone(), nodes) {
                LiaResult::Unsat => {}
                LiaResult::Unknown(w) => unknown = Some(w),
                sat => return sat,
            }
        }
        unknown.map(LiaResult::Unknown).unwrap_or(LiaResult::Unsat)
    }

    fn cube(&self, lits: &[Formula], nodes: &Cell<usize>) -> Cube {
        // Constructor-term equations.
        let mut subst = Subst::new();
        let mut int_eqs: Vec<LinExpr> = Vec::new();
        for l in lits {
            if let Formula::TermEq(a, b, true) = l {
                if !unify(a, b, &mut subst, &mut int_eqs) {
                    return Cube::Done(LiaResult::Unsat);
                }
            }
        }
        let mut rest: Vec<Formula> = Vec::new();
        for l in lits {
            match l {
                Formula::TermEq(_, _, true) => {}
                Formula::TermEq(a, b, false) => {
                    let mut s = subst.clone();
                    let mut eqs = Vec::new();
                    if !unify(a, b, &mut s, &mut eqs) {
                        continue;
                    }
                    if s.len() != subst.len() {
                        return Cube::Done(LiaResult::Unknown("disequality between data terms".into()));
                    }
                    let alternatives: Vec<Formula> = eqs.into_iter().map(|e| Formula::lin(e, Rel::Ne)).collect();
                    let others: Vec<Formula> = lits.iter().filter(|x| *x != l).cloned().collect();
                    return Cube::Split(others, Formula::or(alternatives));
                }
                other => rest.push(other.subst(&resolve_all(&subst))),
            }
        }
        // Bool literals.
        let mut bools: BTreeMap<String, bool> = BTreeMap::new();
        let mut atoms: Vec<(LinExpr, Rel)> = int_eqs.into_iter().map(|e| (e, Rel::Eq)).collect();
        for l in &rest {
            match l {
                Formula::True => {}
                Formula::False => return Cube::Done(LiaResult::Unsat),
                Formula::Bool(v, p) => {
                    if bools.insert(v.clone(), *p).is_some_and(|q| q != *p) {
                        return Cube::Done(LiaResult::Unsat);
                    }
                }
                Formula::Lin(a) => atoms.push((a.expr.clone(), a.rel)),
                Formula::And(_) | Formula::Or(_) => {
                    // produced by substitution into a literal; solve it properly
                    let others: Vec<Formula> = rest.iter().filter(|x| *x != l).cloned().collect();
                    let mut keep: Vec<Formula> =
                        lits.iter().filter(|x| matches!(x, Formula::TermEq(_, _, true))).cloned().collect();
                    keep.extend(others);
                    return Cube::Split(keep, l.clone());
                }
                Formula::TermEq(..) => unreachable!(),
            }
        }
        let ints = match solve_int(&atoms, self.budget, nodes) {
            LiaResult::Sat(a) => a,
            other => return Cube::Done(other),
        };
        let mut a: Assignment = ints;
        for (v, b) in bools {
            a.insert(v, Value::Bool(b));
        }
        self.complete_terms(&mut a, &subst);
        Cube::Done(LiaResult::Sat(a))
    }

    /// Gives values to variables bound by unification, defaulting the
    /// variables their terms leave open.
    fn complete_terms(&self, a: &mut Assignment, subst: &Subst) {
        let resolved = resolve_all(subst);
        let mut open = Vec::new();
        for t in resolved.values() {
            t.collect_vars(&mut open);
        }
        for v in open {
            if a.contains_key(&v) || resolved.contains_key(&v) {
                continue;
            }
            let sort = self.sorts.and_then(|s| s.get(&v));
            let value = match (sort, self.sys) {
                (Some(s), Some(sys)) => default_value(s, sys),
                (Some(Sort::Int), None) => Value::Int(0),
                _ if is_int_var(&v, &resolved) => Value::Int(0),
                _ => continue,
            };
            a.insert(v, value);
        }
        for (v, t) in &resolved {
            if let Some(val) = eval_term(t, a) {
                a.insert(v.clone(), val);
            }
        }
    }
}

fn is_int_var(v: &str, s: &Subst) -> bool {
    fn in_term(v: &str, t: &Term) -> bool {
        match t {
            Term::Int(e) => e.coeff(v) != 0,
            Term::Ctor(_, args) => args.iter().any(|a| in_term(v, a)),
            _ => false,
        }
    }
    s.values().any(|t| in_term(v, t))
}

fn walk(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Var(v) => match s.get(v) {
            Some(u) => walk(u, s),
            None => t.clone(),
        },
        _ => t.clone(),
    }
}

/// Fully applies a triangular substitution.
pub(crate) fn resolve_all(s: &Subst) -> Subst {
    fn go(t: &Term, s: &Subst, depth: usize) -> Term {
        if depth > 64 {
            return t.clone();
        }
        match t {
            Term::Var(v) => match s.get(v) {
                Some(u) => go(u, s, depth + 1),
                None => t.clone(),
            },
            Term::Ctor(c, args) => Term::Ctor(c.clone(), args.iter().map(|a| go(a, s, depth + 1)).collect()),
            other => other.clone(),
        }
    }
    s.iter().map(|(k, v)| (k.clone(), go(v, s, 0))).collect()
}

fn occurs(v: &str, t: &Term, s: &Subst) -> bool {
    match walk(t, s) {
        Term::Var(w) => w == v,
        Term::Ctor(_, args) => args.iter().any(|a| occurs(v, a, s)),
        _ => false,
    }
}

/// Unifies two terms, extending `s` (non-integer variables) and collecting
/// integer equations `e = 0` in `eqs`. Returns false on a clash.
pub(crate) fn unify(a: &Term, b: &Term, s: &mut Subst, eqs: &mut Vec<LinExpr>) -> bool {
    let (a, b) = (walk(a, s), walk(b, s));
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if occurs(x, t, s) {
                return false;
            }
            s.insert(x.clone(), t.clone());
            true
        }
        (Term::Int(x), Term::Int(y)) => {
            let d = x.sub(y);
            match d.as_constant() {
                Some(k) => k == 0,
                None => {
                    eqs.push(d);
                    true
                }
            }
        }
        (Term::Bool(x), Term::Bool(y)) => x == y,
        (Term::Unit, Term::Unit) => true,
        (Term::Ctor(c, xs), Term::Ctor(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, s, eqs))
        }
        _ => false,
    }
}

/// Integer feasibility of a conjunction of `e REL 0` atoms.
fn solve_int(atoms: &[(LinExpr, Rel)], budget: usize, nodes: &Cell<usize>) -> LiaResult {
    let mut les: Vec<LinExpr> = Vec::new();
    let mut nes: Vec<LinExpr> = Vec::new();
    let mut eqs: Vec<LinExpr> = Vec::new();
    for (e, r) in atoms {
        match r {
            Rel::Eq => eqs.push(e.clone()),
            Rel::Le => les.push(e.clone()),
            Rel::Ne => nes.push(e.clone()),
        }
    }
    let mut all_vars: BTreeSet<String> = BTreeSet::new();
    for (e, _) in atoms {
        all_vars.extend(e.vars().map(str::to_string));
    }
    // Eliminate every equality exactly. A unit coefficient is substituted
    // directly; otherwise x_k is rewritten through a fresh σ so that the
    // remaining coefficients shrink as in Euclid's algorithm.
    let mut solved: Vec<(String, LinExpr)> = Vec::new();
    let mut fresh = 0usize;
    while let Some(e) = eqs.pop() {
        let g = e.coeff_gcd();
        if g == 0 {
            if e.constant_part() != 0 {
                return LiaResult::Unsat;
            }
            continue;
        }
        if e.constant_part() % g != 0 {
            return LiaResult::Unsat;
        }
        let e = LinExpr::from_parts(e.coeffs().map(|(v, c)| (v.to_string(), c / g)), e.constant_part() / g);
        let unit = e.coeffs().find(|(_, c)| c.abs() == 1).map(|(v, c)| (v.to_string(), c));
        let (x, by) = match unit {
            // c·x + rest = 0  ⇒  x = -c·rest
            Some((x, c)) => {
                let by = e.sub(&LinExpr::term(c, x.clone())).scale(-c);
                (x, by)
            }
            None => {
                let (x, m) = e.coeffs().min_by_key(|(_, c)| c.abs()).map(|(v, c)| (v.to_string(), c)).unwrap();
                let (e, m) = if m < 0 { (e.scale(-1), -m) } else { (e, m) };
                fresh += 1;
                let sigma = format!("σ{fresh}");
                // x = σ - Σ ⌊aᵢ/m⌋·xᵢ - ⌊c/m⌋
                let by = LinExpr::from_parts(
                    e.coeffs().filter(|(v, _)| *v != x).map(|(v, c)| (v.to_string(), -Integer::div_floor(&c, &m))),
                    -Integer::div_floor(&e.constant_part(), &m),
                )
                .add(&LinExpr::var(sigma));
                eqs.push(e.substitute(&x, &by));
                (x, by)
            }
        };
        let sub = |f: &LinExpr| f.substitute(&x, &by);
        eqs = eqs.iter().map(sub).collect();
        les = les.iter().map(sub).collect();
        nes = nes.iter().map(sub).collect();
        for (_, s) in solved.iter_mut() {
            *s = s.substitute(&x, &by);
        }
        solved.push((x, by));
    }
    let result = branch_and_bound(les, &nes, budget, nodes);
    let LiaResult::Sat(mut a) = result else { return result };
    for (x, by) in solved.iter().rev() {
        let v = by
            .eval(&|n| match a.get(n) {
                Some(Value::Int(k)) => Some(*k),
                _ => Some(0),
            })
            .unwrap();
        a.insert(x.clone(), Value::Int(v));
    }
    a.retain(|v, _| !v.starts_with('σ'));
    for v in all_vars {
        a.entry(v).or_insert(Value::Int(0));
    }
    LiaResult::Sat(a)
}

fn tighten(e: &LinExpr) -> Option<LinExpr> {
    match Formula::lin(e.clone(), Rel::Le) {
        Formula::True => None,
        Formula::Lin(a) => Some(a.expr),
        // constant violated constraint: keep a canonical false
        _ => Some(LinExpr::constant(1)),
    }
}

fn branch_and_bound(les: Vec<LinExpr>, nes: &[LinExpr], budget: usize, nodes: &Cell<usize>) -> LiaResult {
    // Depth-first with an explicit stack: unbounded problems can branch deep.
    let mut stack = vec![les];
    let mut unknown = None;
    while let Some(les) = stack.pop() {
        nodes.set(nodes.get() + 1);
        if nodes.get() > budget {
            return LiaResult::Unknown(format!("branch-and-bound budget of {budget} nodes exhausted"));
        }
        let point = match rational_point(&les) {
            Ok(Some(p)) => p,
            Ok(None) => continue,
            Err(why) => {
                unknown = Some(why);
                continue;
            }
        };
        let split = |extra: [LinExpr; 2], stack: &mut Vec<Vec<LinExpr>>| {
            for e in extra.into_iter().rev() {
                // Successive bounds on one variable are parallel; keep the tightest.
                if let Some(l) = prune_parallel(les.iter().cloned().chain([e])) {
                    stack.push(l);
                }
            }
        };
        if let Some((x, v)) = point.iter().find(|(_, v)| !v.is_integer()) {
            let down = LinExpr::var(x.clone()).add_constant(-v.floor().to_integer());
            let up = LinExpr::term(-1, x.clone()).add_constant(v.ceil().to_integer());
            split([down, up], &mut stack);
            continue;
        }
        let mut a: Assignment = point.iter().map(|(k, v)| (k.clone(), Value::Int(v.to_integer()))).collect();
        let val =
            |e: &LinExpr| e.eval(&|n| Some(a.get(n).map(|v| if let Value::Int(k) = v { *k } else { 0 }).unwrap_or(0)));
        if let Some(e) = nes.iter().find(|e| val(e) == Some(0)) {
            // e ≠ 0  ⇔  e ≤ -1 ∨ e ≥ 1
            split([e.add_constant(1), e.scale(-1).add_constant(1)], &mut stack);
            continue;
        }
        for e in nes {
            for v in e.vars() {
                a.entry(v.to_string()).or_insert(Value::Int(0));
            }
        }
        return LiaResult::Sat(a);
    }
    unknown.map(LiaResult::Unknown).unwrap_or(LiaResult::Unsat)
}

const MAX_CONSTRAINTS: usize = 2_000;

/// Keeps the tightest of each family of parallel constraints. `None` when two
/// opposite bounds contradict each other.
fn prune_parallel(cs: impl IntoIterator<Item = LinExpr>) -> Option<Vec<LinExpr>> {
    let mut best: BTreeMap<LinExpr, i128> = BTreeMap::new();
    for e in cs {
        let k = e.constant_part();
        let lin = e.add_constant(-k);
        let slot = best.entry(lin).or_insert(k);
        *slot = (*slot).max(k);
    }
    for (lin, k) in &best {
        // lin + k ≤ 0 and -lin + k' ≤ 0 need k' ≤ lin ≤ -k.
        if let Some(k2) = best.get(&lin.scale(-1)) {
            if *k2 > -k {
                return None;
            }
        }
    }
    Some(best.into_iter().map(|(lin, k)| lin.add_constant(k)).collect())
}

/// An equality hidden as a pair of opposite bounds, with a positive
/// coefficient on its chosen variable.
fn find_equality(cs: &[LinExpr]) -> Option<(LinExpr, String)> {
    let set: BTreeSet<&LinExpr> = cs.iter().collect();
    cs.iter()
        .filter(|e| set.contains(&e.scale(-1)))
        .filter_map(|e| {
            let (x, c) = e.coeffs().min_by_key(|(_, c)| c.abs())?;
            Some((if c > 0 { e.clone() } else { e.scale(-1) }, x.to_string()))
        })
        .min_by_key(|(e, x)| e.coeff(x).abs())
}

/// A rational point satisfying every `e ≤ 0`, preferring integers close to
/// zero; `Ok(None)` if the (integer-tightened) projection is infeasible.
fn rational_point(les: &[LinExpr]) -> Result<Option<BTreeMap<String, Q>>, String> {
    let mut current: Vec<LinExpr> = Vec::new();
    for e in les {
        match tighten(e) {
            None => {}
            Some(t) if t.is_constant() => return Ok(None),
            Some(t) => current.push(t),
        }
    }
    let mut levels: Vec<(String, Vec<LinExpr>)> = Vec::new();
    loop {
        let Some(pruned) = prune_parallel(current) else { return Ok(None) };
        current = pruned;
        if let Some((eq, x)) = find_equality(&current) {
            // Substitute away x; the equality's two halves record its value.
            let a = eq.coeff(&x);
            let mut next = Vec::new();
            for e in &current {
                let b = e.coeff(&x);
                if *e == eq || *e == eq.scale(-1) || b == 0 {
                    if b == 0 {
                        next.push(e.clone());
                    }
                    continue;
                }
                let g = a.gcd(&b.abs());
                match tighten(&e.scale(a / g).sub(&eq.scale(b / g))) {
                    None => {}
                    Some(t) if t.is_constant() => return Ok(None),
                    Some(t) => next.push(t),
                }
            }
            levels.push((x, vec![eq.clone(), eq.scale(-1)]));
            current = next;
            continue;
        }
        let vars: BTreeSet<String> = current.iter().flat_map(|e| e.vars().map(str::to_string)).collect();
        let Some(x) = vars
            .iter()
            .min_by_key(|v| {
                let p = current.iter().filter(|e| e.coeff(v) > 0).count();
                let n = current.iter().filter(|e| e.coeff(v) < 0).count();
                p * n
            })
            .cloned()
        else {
            break;
        };
        let (with, without): (Vec<LinExpr>, Vec<LinExpr>) = current.into_iter().partition(|e| e.coeff(&x) != 0);
        let mut next: BTreeSet<LinExpr> = without.into_iter().collect();
        for p in with.iter().filter(|e| e.coeff(&x) > 0) {
            for n in with.iter().filter(|e| e.coeff(&x) < 0) {
                let (cp, cn) = (p.coeff(&x), -n.coeff(&x));
                let l = cp.lcm(&cn);
                let combo = p.scale(l / cp).add(&n.scale(l / cn));
                match tighten(&combo) {
                    None => {}
                    Some(t) if t.is_constant() => return Ok(None),
                    Some(t) => {
                        next.insert(t);
                    }
                }
            }
            if next.len() > MAX_CONSTRAINTS {
                return Err("variable elimination exceeded its size limit".into());
            }
        }
        levels.push((x, with));
        current = next.into_iter().collect();
    }
    let mut point: BTreeMap<String, Q> = BTreeMap::new();
    for (x, cs) in levels.iter().rev() {
        let (mut lo, mut hi): (Option<Q>, Option<Q>) = (None, None);
        for e in cs {
            let a = e.coeff(x);
            let mut rest = Q::from_integer(e.constant_part());
            for (v, c) in e.coeffs() {
                if v != x {
                    rest += Q::from_integer(c) * point.get(v).cloned().unwrap_or_else(Q::zero);
                }
            }
            let bound = -rest / Q::from_integer(a);
            if a > 0 {
                hi = Some(hi.map_or(bound, |h: Q| h.min(bound)));
            } else {
                lo = Some(lo.map_or(bound, |l: Q| l.max(bound)));
            }
        }
        let value = match (lo, hi) {
            (Some(l), Some(h)) if l > h => return Err("inconsistent back-substitution".into()),
            (Some(l), Some(h)) => {
                let (cl, fh) = (l.ceil(), h.floor());
                if cl > fh {
                    l
                } else if cl <= Q::zero() && fh >= Q::zero() {
                    Q::zero()
                } else if cl > Q::zero() {
                    cl
                } else {
                    fh
                }
            }
            (Some(l), None) => {
                if l <= Q::zero() {
                    Q::zero()
                } else {
                    l.ceil()
                }
            }
            (None, Some(h)) => {
                if h >= Q::zero() {
                    Q::zero()
                } else {
                    h.floor()
                }
            }
            (None, None) => Q::zero(),
        };
        point.insert(x.clone(), value);
    }
    Ok(Some(point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horn::CmpOp;

    fn v(n: &str) -> LinExpr {
        LinExpr::var(n)
    }
    fn k(n: i128) -> LinExpr {
        LinExpr::constant(n)
    }
    fn cmp(a: LinExpr, op: CmpOp, b: LinExpr) -> Formula {
        Formula::cmp(&a, op, &b)
    }

    #[test]
    fn contradiction() {
        let f = Formula::and([cmp(v("x"), CmpOp::Gt, k(100)), cmp(v("x"), CmpOp::Le, k(100))]);
        assert_eq!(lia_sat(&f), LiaResult::Unsat);
    }

    #[test]
    fn boundary_case() {
        let f = Formula::and([cmp(v("x"), CmpOp::Le, k(101)), cmp(v("x"), CmpOp::Gt, k(100))]);
        match lia_sat(&f) {
            LiaResult::Sat(a) => assert_eq!(a["x"], Value::Int(101)),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn integrality_gap() {
        let f = Formula::and([cmp(v("x"), CmpOp::Gt, v("y")), cmp(v("y"), CmpOp::Gt, v("x").add_constant(-1))]);
        assert_eq!(lia_sat(&f), LiaResult::Unsat);
        // 2x = 2y + 1 has rational but no integer solutions
        let g = cmp(v("x").scale(2), CmpOp::Eq, v("y").scale(2).add_constant(1));
        assert_eq!(lia_sat(&g), LiaResult::Unsat);
        // 3 ≤ 2x ≤ 3 needs branching
        let h = Formula::and([
            cmp(v("x").scale(2).add(&v("y").scale(2)), CmpOp::Ge, k(3)),
            cmp(v("x").scale(2).add(&v("y").scale(2)), CmpOp::Le, k(3)),
        ]);
        assert_eq!(lia_sat(&h), LiaResult::Unsat);
    }

    #[test]
    fn validity() {
        assert!(lia_valid(&cmp(v("x"), CmpOp::Gt, k(100)), &cmp(v("x"), CmpOp::Ge, k(101))));
        assert!(lia_valid(&Formula::True, &cmp(v("x"), CmpOp::Eq, v("x"))));
        assert!(!lia_valid(&Formula::True, &cmp(v("x"), CmpOp::Ge, k(0))));
    }

    #[test]
    fn disequalities_and_bools() {
        let f = Formula::and([
            cmp(v("x"), CmpOp::Ge, k(0)),
            cmp(v("x"), CmpOp::Le, k(1)),
            cmp(v("x"), CmpOp::Ne, k(0)),
            Formula::bool_var("b", true),
        ]);
        match lia_sat(&f) {
            LiaResult::Sat(a) => {
                assert_eq!(a["x"], Value::Int(1));
                assert_eq!(a["b"], Value::Bool(true));
            }
            r => panic!("{r:?}"),
        }
        let g = Formula::and([Formula::bool_var("b", true), Formula::bool_var("b", false)]);
        assert_eq!(lia_sat(&g), LiaResult::Unsat);
    }

    #[test]
    fn constructor_terms() {
        let t = |c: &str, x: Term| Term::Ctor(c.into(), vec![x]);
        let f = Formula::and([
            Formula::term_eq(Term::Var("f".into()), t("check", Term::int_var("a")), true),
            Formula::term_eq(Term::Var("f".into()), t("check", Term::int(3)), true),
        ]);
        match lia_sat(&f) {
            LiaResult::Sat(a) => {
                assert_eq!(a["a"], Value::Int(3));
                assert_eq!(a["f"], Value::Ctor("check".into(), vec![Value::Int(3)]));
            }
            r => panic!("{r:?}"),
        }
        let g = Formula::term_eq(t("check", Term::int_var("a")), t("succ", Term::Var("f".into())), true);
        assert_eq!(lia_sat(&g), LiaResult::Unsat);
        let h = Formula::and([
            Formula::term_eq(t("check", Term::int_var("a")), t("check", Term::int_var("b")), false),
            cmp(v("a"), CmpOp::Eq, v("b")),
        ]);
        assert_eq!(lia_sat(&h), LiaResult::Unsat);
    }

    #[test]
    fn mccarthy_base_obligation() {
        // x > 100 ⟹ summary(x, x - 10)
        let x = v("x");
        let y = x.add_constant(-10);
        let summary = Formula::and([
            Formula::or([cmp(y.clone(), CmpOp::Le, x.add_constant(-10)), cmp(y.clone(), CmpOp::Le, k(91))]),
            cmp(y.clone(), CmpOp::Ge, k(91)),
            cmp(x.clone(), CmpOp::Le, y.add_constant(10)),
        ]);
        assert!(lia_valid(&cmp(x, CmpOp::Gt, k(100)), &summary));
    }
}
