//! Defunctionalization of typed programs into Horn systems: closure ADTs,
//! evaluator relations, per-function relations with success flags, goal
//! clauses, and the specializer that strips superfluous structure.

mod canonical;
mod closures;
mod specialize;

use thiserror::Error;

use crate::frontend::{FrontendError, Type, TypedProgram};
use crate::horn::HornSystem;

pub use canonical::encode_canonical;
pub use closures::{collect_closures, ClosureAdt, ClosureCtor, ClosureInfo};
pub use specialize::specialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    Canonical,
    #[default]
    Specialized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncodingOptions {
    pub mode: Mode,
    /// Split success flags into success and failure relations.
    pub elide_ok: bool,
    /// Unfold closure types with a single non-recursive constructor.
    pub unfold_singleton_closures: bool,
    /// Drop argument positions that are never constrained or read.
    pub drop_unused_args: bool,
}

impl Default for EncodingOptions {
    fn default() -> Self {
        EncodingOptions {
            mode: Mode::Specialized,
            elide_ok: true,
            unfold_singleton_closures: true,
            drop_unused_args: true,
        }
    }
}

impl EncodingOptions {
    pub fn canonical() -> Self {
        EncodingOptions {
            mode: Mode::Canonical,
            elide_ok: false,
            unfold_singleton_closures: false,
            drop_unused_args: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error("no closure of type {0} is ever built; cannot encode values of this type")]
    UninhabitedClosureType(Type),
    #[error("unsupported construct: {0}")]
    Unsupported(String),
}

/// Encodes a typed, normalized program according to `opts`.
pub fn encode(p: &TypedProgram, opts: &EncodingOptions) -> Result<HornSystem, EncodeError> {
    let canonical = encode_canonical(p)?;
    Ok(match opts.mode {
        Mode::Canonical => canonical,
        Mode::Specialized => specialize(&canonical, opts),
    })
}

/// Parses, types, normalizes and encodes source text.
pub fn encode_source(src: &str, opts: &EncodingOptions) -> Result<HornSystem, EncodeError> {
    let surface = crate::frontend::parse(src)?;
    let typed = crate::frontend::infer_types(&surface)?;
    encode(&crate::frontend::normalize(&typed), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horn::{validate, Head};

    const EX1: &str = include_str!("../../examples/programs/example1.hof");
    const EX2: &str = include_str!("../../examples/programs/example2.hof");
    const MC: &str = include_str!("../../examples/programs/mccarthy.hof");

    #[test]
    fn canonical_sizes() {
        let c = EncodingOptions::canonical();
        assert_eq!(encode_source(EX1, &c).unwrap().clauses.len(), 5);
        assert_eq!(encode_source(EX2, &c).unwrap().clauses.len(), 10);
        assert_eq!(encode_source(MC, &c).unwrap().clauses.len(), 3);
        assert!(encode_source("", &c).unwrap().clauses.is_empty());
    }

    #[test]
    fn every_constructor_has_one_evaluator_clause() {
        let sys = encode_source(EX2, &EncodingOptions::canonical()).unwrap();
        for d in &sys.datatypes {
            for ctor in &d.ctors {
                let n = sys
                    .clauses
                    .iter()
                    .filter(|c| match &c.head {
                        Head::Pred(h) => h.pred.starts_with("Ev") && h.args[0].ctor_name() == Some(ctor.name.as_str()),
                        Head::False => false,
                    })
                    .count();
                assert_eq!(n, 1, "{}", ctor.name);
            }
        }
    }

    #[test]
    fn first_order_has_no_datatypes() {
        let sys = encode_source(MC, &EncodingOptions::canonical()).unwrap();
        assert!(sys.datatypes.is_empty());
    }

    #[test]
    fn encodings_validate() {
        for src in [EX1, EX2, MC] {
            for opts in [EncodingOptions::canonical(), EncodingOptions::default()] {
                let sys = encode_source(src, &opts).unwrap();
                assert_eq!(validate(&sys), vec![], "{sys}");
            }
        }
    }

    #[test]
    fn specialize_is_a_fixpoint_without_structure() {
        let sys = encode_source(MC, &EncodingOptions::default()).unwrap();
        let again = specialize(&sys, &EncodingOptions::default());
        assert_eq!(again.clauses, sys.clauses);
    }

    #[test]
    fn specialized_example2_drops_first_closure() {
        let sys = encode_source(EX2, &EncodingOptions::default()).unwrap();
        assert_eq!(sys.clauses.len(), 8);
        assert_eq!(sys.datatypes.len(), 1);
        assert_eq!(sys.datatypes[0].to_string(), "clo2 ::= check Int | succ clo2");
    }
}
