//! Karr's analysis: least fixpoint of affine equalities over the integer
//! argument positions of each predicate.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Zero};

#[cfg(test)]
use crate::horn::Term;
use crate::horn::{Clause, Formula, Head, HornSystem, Interp, LinExpr, Model, Rel, Sort};

type Q = BigRational;

fn q(k: i128) -> Q {
    Q::from_integer(BigInt::from(k))
}

/// An affine subspace of Qⁿ as equalities `row · x = rhs` in reduced row
/// echelon form, or the empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSubspace {
    dim: usize,
    eqs: Option<Vec<(Vec<Q>, Q)>>,
}

/// Gauss-Jordan on augmented rows; `None` when `0 = c ≠ 0` appears.
fn rref(mut rows: Vec<(Vec<Q>, Q)>, n: usize) -> Option<Vec<(Vec<Q>, Q)>> {
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i].0[col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r].0[col].recip();
        for x in rows[r].0.iter_mut() {
            *x *= &inv;
        }
        rows[r].1 *= &inv;
        for i in 0..rows.len() {
            if i != r && !rows[i].0[col].is_zero() {
                let f = rows[i].0[col].clone();
                for j in 0..n {
                    let d = &f * &rows[r].0[j];
                    rows[i].0[j] -= d;
                }
                let d = &f * &rows[r].1;
                rows[i].1 -= d;
            }
        }
        r += 1;
    }
    if rows[r..].iter().any(|(_, b)| !b.is_zero()) {
        return None;
    }
    rows.truncate(r);
    Some(rows)
}

fn pivot(row: &[Q]) -> usize {
    row.iter().position(|x| !x.is_zero()).expect("zero row in echelon form")
}

impl AffineSubspace {
    pub fn bottom(dim: usize) -> Self {
        AffineSubspace { dim, eqs: None }
    }

    pub fn top(dim: usize) -> Self {
        AffineSubspace { dim, eqs: Some(Vec::new()) }
    }

    /// Solutions of the given equalities.
    pub fn from_equalities(dim: usize, eqs: Vec<(Vec<Q>, Q)>) -> Self {
        AffineSubspace { dim, eqs: rref(eqs, dim) }
    }

    pub fn is_bottom(&self) -> bool {
        self.eqs.is_none()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the subspace; `None` for bottom.
    pub fn dimension(&self) -> Option<usize> {
        self.eqs.as_ref().map(|e| self.dim - e.len())
    }

    pub fn equalities(&self) -> &[(Vec<Q>, Q)] {
        self.eqs.as_deref().unwrap_or(&[])
    }

    /// A point plus a basis of directions.
    pub fn generators(&self) -> Option<(Vec<Q>, Vec<Vec<Q>>)> {
        let eqs = self.eqs.as_ref()?;
        let pivots: Vec<usize> = eqs.iter().map(|(r, _)| pivot(r)).collect();
        let mut point = vec![Q::zero(); self.dim];
        for ((_, b), &p) in eqs.iter().zip(&pivots) {
            point[p] = b.clone();
        }
        let mut basis = Vec::new();
        for free in (0..self.dim).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Q::zero(); self.dim];
            v[free] = Q::one();
            for ((r, _), &p) in eqs.iter().zip(&pivots) {
                v[p] = -r[free].clone();
            }
            basis.push(v);
        }
        Some((point, basis))
    }

    pub fn from_generators(point: Vec<Q>, vectors: &[Vec<Q>]) -> Self {
        let n = point.len();
        // Equalities a·x = a·p for every a orthogonal to all vectors.
        let rows: Vec<(Vec<Q>, Q)> = vectors.iter().map(|v| (v.clone(), Q::zero())).collect();
        let span = rref(rows, n).expect("homogeneous system");
        let pivots: Vec<usize> = span.iter().map(|(r, _)| pivot(r)).collect();
        let mut eqs = Vec::new();
        for free in (0..n).filter(|c| !pivots.contains(c)) {
            let mut a = vec![Q::zero(); n];
            a[free] = Q::one();
            for ((r, _), &p) in span.iter().zip(&pivots) {
                a[p] = -r[free].clone();
            }
            let b = a.iter().zip(&point).fold(Q::zero(), |acc, (x, y)| acc + x * y);
            eqs.push((a, b));
        }
        AffineSubspace::from_equalities(n, eqs)
    }

    pub fn point(point: Vec<Q>) -> Self {
        AffineSubspace::from_generators(point, &[])
    }

    /// Affine hull of the union.
    pub fn join(&self, other: &Self) -> Self {
        let (Some((p, mut vs)), Some((p2, vs2))) = (self.generators(), other.generators()) else {
            return if self.is_bottom() { other.clone() } else { self.clone() };
        };
        vs.extend(vs2);
        vs.push(p2.iter().zip(&p).map(|(a, b)| a - b).collect());
        AffineSubspace::from_generators(p, &vs)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        match &self.eqs {
            None => false,
            Some(eqs) => eqs.iter().all(|(r, b)| r.iter().zip(x).fold(Q::zero(), |acc, (a, v)| acc + a * v) == *b),
        }
    }

    /// Every point satisfies `a · x = b` (vacuously true on bottom).
    pub fn entails(&self, a: &[Q], b: &Q) -> bool {
        let Some((p, vs)) = self.generators() else { return true };
        let dot = |v: &[Q]| v.iter().zip(a).fold(Q::zero(), |acc, (x, y)| acc + x * y);
        dot(&p) == *b && vs.iter().all(|v| dot(v).is_zero())
    }

    /// Equalities as integer linear expressions `e = 0` over `names`.
    pub fn to_lin(&self, names: &[String]) -> Option<Vec<LinExpr>> {
        let eqs = self.eqs.as_ref()?;
        Some(
            eqs.iter()
                .map(|(r, b)| {
                    let lcm = r
                        .iter()
                        .chain(std::iter::once(b))
                        .fold(BigInt::one(), |l, x| num::integer::lcm(l, x.denom().clone()));
                    let scale = |x: &Q| -> i128 {
                        let v = (x * Q::from_integer(lcm.clone())).to_integer();
                        i128::try_from(v).expect("coefficient overflow")
                    };
                    LinExpr::from_parts(names.iter().cloned().zip(r.iter().map(scale)), -scale(b))
                })
                .collect(),
        )
    }

    pub fn to_formula(&self, names: &[String]) -> Formula {
        match self.to_lin(names) {
            None => Formula::False,
            Some(es) => Formula::and(es.into_iter().map(|e| Formula::lin(e, Rel::Eq))),
        }
    }
}

impl fmt::Display for AffineSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.dim).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.to_formula(&names))
    }
}

/// Karr result for one predicate: the subspace over its Int positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredInvariant {
    pub positions: Vec<usize>,
    pub space: AffineSubspace,
}

impl PredInvariant {
    /// The subspace as an interpretation (ADT and Bool positions unconstrained).
    pub fn to_interp(&self, sorts: &[Sort]) -> Interp {
        let params = crate::horn::default_params(sorts);
        let names: Vec<String> = self.positions.iter().map(|&i| params[i].0.clone()).collect();
        let body = self.space.to_formula(&names);
        Interp::single(params, body)
    }
}

fn int_positions(sorts: &[Sort]) -> Vec<usize> {
    sorts.iter().enumerate().filter(|(_, s)| **s == Sort::Int).map(|(i, _)| i).collect()
}

fn lin_row(e: &LinExpr, index: &BTreeMap<&str, usize>) -> (Vec<Q>, Q) {
    let mut row = vec![Q::zero(); index.len()];
    for (v, c) in e.coeffs() {
        row[index[v]] += q(c);
    }
    (row, q(-e.constant_part()))
}

/// Image of one clause's head under the current body subspaces.
fn transfer(c: &Clause, inv: &BTreeMap<String, PredInvariant>) -> Option<(Vec<Q>, Vec<Vec<Q>>)> {
    let Head::Pred(h) = &c.head else { return None };
    let vars: Vec<&str> = c.vars.iter().filter(|(_, s)| *s == Sort::Int).map(|(v, _)| v.as_str()).collect();
    let index: BTreeMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut rows = Vec::new();
    for f in c.constraint.conjuncts() {
        if let Formula::Lin(a) = f {
            if a.rel == Rel::Eq {
                rows.push(lin_row(&a.expr, &index));
            }
        }
    }
    for b in &c.body {
        let pi = &inv[&b.pred];
        let eqs = pi.space.eqs.as_ref()?;
        let args: Vec<&LinExpr> = pi.positions.iter().map(|&i| b.args[i].as_lin().expect("Int position")).collect();
        for (r, rhs) in eqs {
            // Σ rᵢ·argᵢ = rhs
            let mut row = vec![Q::zero(); index.len()];
            let mut k = rhs.clone();
            for (ri, a) in r.iter().zip(&args) {
                if ri.is_zero() {
                    continue;
                }
                for (v, c) in a.coeffs() {
                    row[index[v]] += ri * q(c);
                }
                k -= ri * q(a.constant_part());
            }
            rows.push((row, k));
        }
    }
    let sol = AffineSubspace::from_equalities(index.len(), rows);
    let (p, basis) = sol.generators()?;
    let head = &inv[&h.pred];
    let image = |x: &[Q], affine: bool| -> Vec<Q> {
        head.positions
            .iter()
            .map(|&i| {
                let e = h.args[i].as_lin().expect("Int position");
                let mut acc = if affine { q(e.constant_part()) } else { Q::zero() };
                for (v, c) in e.coeffs() {
                    acc += q(c) * &x[index[v]];
                }
                acc
            })
            .collect()
    };
    Some((image(&p, true), basis.iter().map(|v| image(v, false)).collect()))
}

/// Least fixpoint of affine equalities; predicates without derivations get
/// bottom. Goal clauses are ignored.
pub fn karr_affine(s: &HornSystem) -> BTreeMap<String, PredInvariant> {
    let mut inv: BTreeMap<String, PredInvariant> = s
        .preds
        .iter()
        .map(|p| {
            let positions = int_positions(&p.sorts);
            let n = positions.len();
            (p.name.clone(), PredInvariant { positions, space: AffineSubspace::bottom(n) })
        })
        .collect();
    loop {
        let mut changed = false;
        for c in &s.clauses {
            let Some((p, vs)) = transfer(c, &inv) else { continue };
            let h = c.head.pred_name().unwrap().to_string();
            let cur = &inv[&h].space;
            let next = cur.join(&AffineSubspace::from_generators(p, &vs));
            if next != *cur {
                inv.get_mut(&h).unwrap().space = next;
                changed = true;
            }
        }
        if !changed {
            return inv;
        }
    }
}

/// Each predicate interpreted by its Karr subspace.
pub fn karr_model(s: &HornSystem, inv: &BTreeMap<String, PredInvariant>) -> Model {
    let mut m = Model::new();
    for p in &s.preds {
        m.insert(p.name.clone(), inv[&p.name].to_interp(&p.sorts));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horn::{PredApp, PredDecl};

    fn v(xs: &[i128]) -> Vec<Q> {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn join_of_points_is_a_line() {
        let a = AffineSubspace::point(v(&[0, 0]));
        let b = AffineSubspace::point(v(&[1, 1]));
        let l = a.join(&b);
        assert_eq!(l.dimension(), Some(1));
        assert!(l.entails(&v(&[1, -1]), &q(0)));
        assert!(l.contains(&v(&[5, 5])));
        assert!(!l.contains(&v(&[5, 4])));
        assert_eq!(l.join(&AffineSubspace::point(v(&[0, 1]))), AffineSubspace::top(2));
        assert_eq!(AffineSubspace::bottom(2).join(&a), a);
    }

    #[test]
    fn echelon_form_is_canonical() {
        let a = AffineSubspace::from_equalities(2, vec![(v(&[2, -2]), q(0))]);
        let b = AffineSubspace::from_equalities(2, vec![(v(&[-1, 1]), q(0)), (v(&[3, -3]), q(0))]);
        assert_eq!(a, b);
        assert!(AffineSubspace::from_equalities(1, vec![(v(&[1]), q(0)), (v(&[1]), q(1))]).is_bottom());
    }

    #[test]
    fn diagonal_counter() {
        let mut s = HornSystem::new();
        s.preds.push(PredDecl::new("p", vec![Sort::Int, Sort::Int]));
        let sorts: BTreeMap<String, Sort> = [("x".into(), Sort::Int), ("y".into(), Sort::Int)].into();
        let x = LinExpr::var("x");
        let y = LinExpr::var("y");
        s.clauses.push(Clause::build(
            &sorts,
            vec![],
            Formula::True,
            Head::Pred(PredApp::new("p", vec![Term::int(0), Term::int(0)])),
        ));
        s.clauses.push(Clause::build(
            &sorts,
            vec![PredApp::new("p", vec![Term::Int(x.clone()), Term::Int(y.clone())])],
            Formula::True,
            Head::Pred(PredApp::new("p", vec![Term::Int(x.add_constant(1)), Term::Int(y.add_constant(1))])),
        ));
        let inv = karr_affine(&s);
        let sp = &inv["p"].space;
        assert_eq!(sp.dimension(), Some(1));
        assert!(sp.entails(&v(&[1, -1]), &q(0)));
    }

    #[test]
    fn underivable_is_bottom() {
        let mut s = HornSystem::new();
        s.preds.push(PredDecl::new("p", vec![Sort::Int]));
        let sorts: BTreeMap<String, Sort> = [("x".into(), Sort::Int)].into();
        let px = PredApp::new("p", vec![Term::int_var("x")]);
        s.clauses.push(Clause::build(&sorts, vec![px.clone()], Formula::True, Head::Pred(px)));
        assert!(karr_affine(&s)["p"].space.is_bottom());
    }
}
