use std::collections::BTreeMap;
use std::fmt;

use num::integer::Integer;

use super::linear::LinExpr;
use super::term::{Subst, Term};

/// Relation of a normalized linear atom `expr REL 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Eq,
    Ne,
    Le,
}

/// Surface comparison operators; normalized away on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinAtom {
    pub expr: LinExpr,
    pub rel: Rel,
}

/// Constraint formula in negation normal form. Negation only appears on
/// atoms (`Ne`, a negative Bool literal, a negative term equation).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Lin(LinAtom),
    /// Bool variable with polarity.
    Bool(String, bool),
    /// Equation (or disequation, when the flag is false) between ADT terms.
    TermEq(Term, Term, bool),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    /// Normalizes `expr REL 0`: gcd-reduced coefficients, integer tightening
    /// of `≤`, positive leading coefficient for (dis)equalities.
    pub fn lin(expr: LinExpr, rel: Rel) -> Formula {
        if let Some(k) = expr.as_constant() {
            let holds = match rel {
                Rel::Eq => k == 0,
                Rel::Ne => k != 0,
                Rel::Le => k <= 0,
            };
            return Formula::from_bool(holds);
        }
        let g = expr.coeff_gcd();
        let k = expr.constant_part();
        let reduced = match rel {
            Rel::Le => {
                let coeffs = expr.coeffs().map(|(v, c)| (v.to_string(), c / g));
                LinExpr::from_parts(coeffs, Integer::div_ceil(&k, &g))
            }
            Rel::Eq | Rel::Ne => {
                if k % g != 0 {
                    return Formula::from_bool(rel == Rel::Ne);
                }
                let lead = expr.coeffs().next().map(|(_, c)| c).unwrap_or(1);
                let g = if lead < 0 { -g } else { g };
                let coeffs = expr.coeffs().map(|(v, c)| (v.to_string(), c / g));
                LinExpr::from_parts(coeffs, k / g)
            }
        };
        Formula::Lin(LinAtom { expr: reduced, rel })
    }

    pub fn cmp(lhs: &LinExpr, op: CmpOp, rhs: &LinExpr) -> Formula {
        let d = lhs.sub(rhs);
        match op {
            CmpOp::Eq => Formula::lin(d, Rel::Eq),
            CmpOp::Ne => Formula::lin(d, Rel::Ne),
            CmpOp::Le => Formula::lin(d, Rel::Le),
            CmpOp::Lt => Formula::lin(d.add_constant(1), Rel::Le),
            CmpOp::Ge => Formula::lin(d.scale(-1), Rel::Le),
            CmpOp::Gt => Formula::lin(d.scale(-1).add_constant(1), Rel::Le),
        }
    }

    pub fn from_bool(b: bool) -> Formula {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    pub fn bool_var(name: impl Into<String>, polarity: bool) -> Formula {
        Formula::Bool(name.into(), polarity)
    }

    /// Formula for a Bool-sorted term.
    pub fn of_bool_term(t: &Term) -> Formula {
        match t {
            Term::Bool(b) => Formula::from_bool(*b),
            Term::Var(v) => Formula::Bool(v.clone(), true),
            other => panic!("not a Bool term: {other}"),
        }
    }

    pub fn term_eq(a: Term, b: Term, positive: bool) -> Formula {
        if a == b {
            return Formula::from_bool(positive);
        }
        if let (Term::Ctor(c1, _), Term::Ctor(c2, _)) = (&a, &b) {
            if c1 != c2 {
                return Formula::from_bool(!positive);
            }
        }
        if a.is_ground() && b.is_ground() {
            // ground terms with equal heads but distinct structure
            return Formula::from_bool(!positive);
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Formula::TermEq(a, b, positive)
    }

    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        dedup(&mut out);
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        dedup(&mut out);
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or([a.negate(), b])
    }

    /// `a ≡ b` in NNF.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        match (&a, &b) {
            (Formula::True, _) => return b,
            (_, Formula::True) => return a,
            (Formula::False, _) => return b.negate(),
            (_, Formula::False) => return a.negate(),
            _ => {}
        }
        Formula::or([Formula::and([a.clone(), b.clone()]), Formula::and([a.negate(), b.negate()])])
    }

    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Lin(a) => match a.rel {
                Rel::Eq => Formula::lin(a.expr.clone(), Rel::Ne),
                Rel::Ne => Formula::lin(a.expr.clone(), Rel::Eq),
                // ¬(e ≤ 0)  ⇔  -e + 1 ≤ 0 over the integers
                Rel::Le => Formula::lin(a.expr.scale(-1).add_constant(1), Rel::Le),
            },
            Formula::Bool(v, p) => Formula::Bool(v.clone(), !p),
            Formula::TermEq(a, b, p) => Formula::TermEq(a.clone(), b.clone(), !p),
            Formula::And(parts) => Formula::or(parts.iter().map(Formula::negate)),
            Formula::Or(parts) => Formula::and(parts.iter().map(Formula::negate)),
        }
    }

    pub fn conjuncts(&self) -> Vec<Formula> {
        match self {
            Formula::True => Vec::new(),
            Formula::And(parts) => parts.clone(),
            other => vec![other.clone()],
        }
    }

    pub fn is_conjunctive(&self) -> bool {
        match self {
            Formula::Or(_) => false,
            Formula::And(parts) => parts.iter().all(|p| !matches!(p, Formula::Or(_) | Formula::And(_))),
            _ => true,
        }
    }

    pub fn subst(&self, s: &Subst) -> Formula {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Lin(a) => {
                let ints: BTreeMap<String, LinExpr> = a
                    .expr
                    .vars()
                    .filter_map(|v| match s.get(v) {
                        Some(Term::Int(by)) => Some((v.to_string(), by.clone())),
                        _ => None,
                    })
                    .collect();
                if ints.is_empty() {
                    self.clone()
                } else {
                    Formula::lin(a.expr.substitute_all(&ints), a.rel)
                }
            }
            Formula::Bool(v, p) => match s.get(v) {
                None => self.clone(),
                Some(Term::Bool(b)) => Formula::from_bool(b == p),
                Some(Term::Var(w)) => Formula::Bool(w.clone(), *p),
                Some(other) => panic!("Bool variable {v} bound to non-Bool term {other}"),
            },
            Formula::TermEq(a, b, p) => Formula::term_eq(a.subst(s), b.subst(s), *p),
            Formula::And(parts) => Formula::and(parts.iter().map(|f| f.subst(s))),
            Formula::Or(parts) => Formula::or(parts.iter().map(|f| f.subst(s))),
        }
    }

    pub fn rename(&self, f: &impl Fn(&str) -> String) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Lin(a) => Formula::lin(a.expr.rename(f), a.rel),
            Formula::Bool(v, p) => Formula::Bool(f(v), *p),
            Formula::TermEq(a, b, p) => Formula::term_eq(a.rename(f), b.rename(f), *p),
            Formula::And(parts) => Formula::and(parts.iter().map(|x| x.rename(f))),
            Formula::Or(parts) => Formula::or(parts.iter().map(|x| x.rename(f))),
        }
    }

    pub fn rename_ctor(&self, f: &impl Fn(&str) -> String) -> Formula {
        match self {
            Formula::TermEq(a, b, p) => Formula::term_eq(a.rename_ctor(f), b.rename_ctor(f), *p),
            Formula::And(parts) => Formula::and(parts.iter().map(|x| x.rename_ctor(f))),
            Formula::Or(parts) => Formula::or(parts.iter().map(|x| x.rename_ctor(f))),
            other => other.clone(),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Lin(a) => Term::Int(a.expr.clone()).collect_vars(out),
            Formula::Bool(v, _) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Formula::TermEq(a, b, _) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::And(parts) | Formula::Or(parts) => parts.iter().for_each(|p| p.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Lin(a) => a.expr.coeff(var) != 0,
            Formula::Bool(v, _) => v == var,
            Formula::TermEq(a, b, _) => a.mentions(var) || b.mentions(var),
            Formula::And(parts) | Formula::Or(parts) => parts.iter().any(|p| p.mentions(var)),
        }
    }

    pub fn mentions_ctor(&self, ctor: &str) -> bool {
        match self {
            Formula::TermEq(a, b, _) => a.mentions_ctor(ctor) || b.mentions_ctor(ctor),
            Formula::And(parts) | Formula::Or(parts) => parts.iter().any(|p| p.mentions_ctor(ctor)),
            _ => false,
        }
    }

    /// Disjunctive normal form as a list of cubes (each a list of literals).
    /// `limit` bounds the number of cubes; `None` when exceeded.
    pub fn dnf(&self, limit: usize) -> Option<Vec<Vec<Formula>>> {
        match self {
            Formula::True => Some(vec![Vec::new()]),
            Formula::False => Some(Vec::new()),
            Formula::Or(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.dnf(limit)?);
                    if out.len() > limit {
                        return None;
                    }
                }
                Some(out)
            }
            Formula::And(parts) => {
                let mut acc: Vec<Vec<Formula>> = vec![Vec::new()];
                for p in parts {
                    let cubes = p.dnf(limit)?;
                    let mut next = Vec::with_capacity(acc.len() * cubes.len());
                    for a in &acc {
                        for c in &cubes {
                            let mut cube = a.clone();
                            cube.extend(c.iter().cloned());
                            next.push(cube);
                        }
                    }
                    if next.len() > limit {
                        return None;
                    }
                    acc = next;
                }
                Some(acc)
            }
            lit => Some(vec![vec![lit.clone()]]),
        }
    }
}

fn dedup(v: &mut Vec<Formula>) {
    let mut seen = std::collections::BTreeSet::new();
    v.retain(|f| seen.insert(f.clone()));
}

fn write_side(f: &mut fmt::Formatter<'_>, terms: &[(String, i128)], k: i128) -> fmt::Result {
    let e = LinExpr::from_parts(terms.iter().cloned(), k);
    write!(f, "{e}")
}

impl fmt::Display for LinAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos: Vec<(String, i128)> =
            self.expr.coeffs().filter(|(_, c)| *c > 0).map(|(v, c)| (v.to_string(), c)).collect();
        let neg: Vec<(String, i128)> =
            self.expr.coeffs().filter(|(_, c)| *c < 0).map(|(v, c)| (v.to_string(), -c)).collect();
        let k = self.expr.constant_part();
        let op = match self.rel {
            Rel::Eq => "=",
            Rel::Ne => "≠",
            Rel::Le => "≤",
        };
        if pos.is_empty() {
            // -Σn + k REL 0  ⇔  Σn REL' k
            let flipped = match self.rel {
                Rel::Le => "≥",
                _ => op,
            };
            write_side(f, &neg, 0)?;
            return write!(f, " {flipped} {k}");
        }
        write_side(f, &pos, 0)?;
        write!(f, " {op} ")?;
        write_side(f, &neg, -k)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Lin(a) => write!(f, "{a}"),
            Formula::Bool(v, true) => write!(f, "{v}"),
            Formula::Bool(v, false) => write!(f, "¬{v}"),
            Formula::TermEq(a, b, true) => write!(f, "{a} = {b}"),
            Formula::TermEq(a, b, false) => write!(f, "{a} ≠ {b}"),
            Formula::And(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ∧ ")?;
                    }
                    if matches!(p, Formula::Or(_)) {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "{p}")?;
                    }
                }
                Ok(())
            }
            Formula::Or(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ∨ ")?;
                    }
                    if matches!(p, Formula::And(_)) {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "{p}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> LinExpr {
        LinExpr::var("x")
    }

    #[test]
    fn strict_comparisons_tighten() {
        let gt = Formula::cmp(&x(), CmpOp::Gt, &LinExpr::constant(100));
        let ge = Formula::cmp(&x(), CmpOp::Ge, &LinExpr::constant(101));
        assert_eq!(gt, ge);
        assert_eq!(gt.to_string(), "x ≥ 101");
    }

    #[test]
    fn gcd_reduction() {
        // 2x ≤ 3  ⇔  x ≤ 1
        let f = Formula::cmp(&x().scale(2), CmpOp::Le, &LinExpr::constant(3));
        assert_eq!(f, Formula::cmp(&x(), CmpOp::Le, &LinExpr::constant(1)));
        // 2x = 3 has no integer solution
        assert_eq!(Formula::cmp(&x().scale(2), CmpOp::Eq, &LinExpr::constant(3)), Formula::False);
        // equalities are sign-normalized
        let a = Formula::cmp(&x(), CmpOp::Eq, &LinExpr::var("y"));
        let b = Formula::cmp(&LinExpr::var("y"), CmpOp::Eq, &x());
        assert_eq!(a, b);
    }

    #[test]
    fn negation_is_nnf() {
        let f = Formula::and([
            Formula::cmp(&LinExpr::var("r1"), CmpOp::Gt, &LinExpr::zero()),
            Formula::cmp(&LinExpr::var("r2"), CmpOp::Lt, &LinExpr::zero()),
        ]);
        let n = f.negate();
        assert_eq!(n.to_string(), "r1 ≤ 0 ∨ r2 ≥ 0");
        assert_eq!(n.negate(), f);
    }

    #[test]
    fn iff_with_constants_collapses() {
        let b = Formula::bool_var("b", true);
        assert_eq!(Formula::iff(Formula::True, b.clone()), b);
        assert_eq!(Formula::iff(b.clone(), Formula::False), b.negate());
    }

    #[test]
    fn dnf_expands() {
        let a = Formula::bool_var("a", true);
        let b = Formula::bool_var("b", true);
        let c = Formula::bool_var("c", true);
        let f = Formula::and([Formula::or([a, b]), c]);
        assert_eq!(f.dnf(10).unwrap().len(), 2);
    }
}
