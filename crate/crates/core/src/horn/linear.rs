use std::collections::BTreeMap;
use std::fmt;

use num::integer::Integer;

/// Integer linear expression `Σ cᵢ·xᵢ + k`. Zero coefficients are never stored
/// and variables are kept in sorted order, so structural equality is semantic
/// equality of the affine function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinExpr {
    coeffs: BTreeMap<String, i128>,
    constant: i128,
}

impl LinExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(k: i128) -> Self {
        LinExpr { coeffs: BTreeMap::new(), constant: k }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Self::term(1, name)
    }

    pub fn term(coeff: i128, name: impl Into<String>) -> Self {
        let mut e = Self::zero();
        e.add_term(coeff, name.into());
        e
    }

    pub fn from_parts(terms: impl IntoIterator<Item = (String, i128)>, constant: i128) -> Self {
        let mut e = Self::constant(constant);
        for (v, c) in terms {
            e.add_term(c, v);
        }
        e
    }

    fn add_term(&mut self, coeff: i128, name: String) {
        if coeff == 0 {
            return;
        }
        let slot = self.coeffs.entry(name.clone()).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.coeffs.remove(&name);
        }
    }

    pub fn constant_part(&self) -> i128 {
        self.constant
    }

    pub fn coeff(&self, var: &str) -> i128 {
        self.coeffs.get(var).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&str, i128)> {
        self.coeffs.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(|k| k.as_str())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_constant(&self) -> Option<i128> {
        self.is_constant().then_some(self.constant)
    }

    /// `Some(x)` when the expression is exactly the variable `x`.
    pub fn as_var(&self) -> Option<&str> {
        if self.constant != 0 || self.coeffs.len() != 1 {
            return None;
        }
        let (v, c) = self.coeffs.iter().next()?;
        (*c == 1).then_some(v.as_str())
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        out.constant += other.constant;
        for (v, c) in &other.coeffs {
            out.add_term(*c, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.scale(-1))
    }

    pub fn add_constant(&self, k: i128) -> LinExpr {
        let mut out = self.clone();
        out.constant += k;
        out
    }

    pub fn scale(&self, k: i128) -> LinExpr {
        if k == 0 {
            return Self::zero();
        }
        LinExpr { coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(), constant: self.constant * k }
    }

    /// gcd of the variable coefficients (0 for a constant expression).
    pub fn coeff_gcd(&self) -> i128 {
        self.coeffs.values().fold(0i128, |g, c| g.gcd(c))
    }

    /// Replace `var` by `by`.
    pub fn substitute(&self, var: &str, by: &LinExpr) -> LinExpr {
        match self.coeffs.get(var) {
            None => self.clone(),
            Some(&c) => {
                let mut rest = self.clone();
                rest.coeffs.remove(var);
                rest.add(&by.scale(c))
            }
        }
    }

    pub fn substitute_all(&self, map: &BTreeMap<String, LinExpr>) -> LinExpr {
        let mut out = LinExpr::constant(self.constant);
        for (v, c) in &self.coeffs {
            match map.get(v) {
                Some(e) => out = out.add(&e.scale(*c)),
                None => out.add_term(*c, v.clone()),
            }
        }
        out
    }

    pub fn rename(&self, f: &impl Fn(&str) -> String) -> LinExpr {
        LinExpr::from_parts(self.coeffs.iter().map(|(v, c)| (f(v), *c)), self.constant)
    }

    pub fn eval(&self, env: &impl Fn(&str) -> Option<i128>) -> Option<i128> {
        let mut acc = self.constant;
        for (v, c) in &self.coeffs {
            acc += c * env(v)?;
        }
        Some(acc)
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}·{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, " + {}", self.constant)
        } else if self.constant < 0 {
            write!(f, " - {}", -self.constant)
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancelling_terms_disappear() {
        let e = LinExpr::var("x").add(&LinExpr::var("y")).sub(&LinExpr::var("x"));
        assert_eq!(e, LinExpr::var("y"));
        assert_eq!(e.as_var(), Some("y"));
    }

    #[test]
    fn substitution_folds_constants() {
        let e = LinExpr::var("x").add_constant(11);
        assert_eq!(e.substitute("x", &LinExpr::constant(5)), LinExpr::constant(16));
    }

    #[test]
    fn display() {
        let e = LinExpr::from_parts([("x".into(), 1), ("y".into(), -2)], -10);
        assert_eq!(e.to_string(), "x - 2·y - 10");
        assert_eq!(LinExpr::zero().to_string(), "0");
    }
}
