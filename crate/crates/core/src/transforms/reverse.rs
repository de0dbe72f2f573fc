use super::TransformError;
use crate::horn::{Clause, Head, HornSystem, Step};

/// Reverses derivation direction (the Magic-set reading): `B ∧ φ → H`
/// becomes `H ∧ φ → B`, goals become facts and facts goals. Linear clauses
/// only; applying it twice gives back the input.
pub fn reverse_rules(s: &HornSystem) -> Result<HornSystem, TransformError> {
    let mut out = s.clone();
    out.clauses = Vec::with_capacity(s.clauses.len());
    for (i, c) in s.clauses.iter().enumerate() {
        if c.body.len() > 1 {
            return Err(TransformError::Nonlinear(i));
        }
        let head = match c.body.first() {
            Some(b) => Head::Pred(b.clone()),
            None => Head::False,
        };
        let body = match &c.head {
            Head::Pred(h) => vec![h.clone()],
            Head::False => Vec::new(),
        };
        out.clauses.push(Clause { vars: c.vars.clone(), body, constraint: c.constraint.clone(), head });
    }
    out.record(Step::note("reverse", "rules reversed"));
    Ok(out)
}
