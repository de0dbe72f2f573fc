//! Satisfiability-preserving clause transformations: predicate merging and
//! unfolding, redundancy removal, resolution on a constructor, argument
//! removal, rule reversal, and quantified abstraction with instantiation.

mod args;
mod inline;
mod quant;
mod reverse;
mod util;

use thiserror::Error;

pub use args::remove_unused_args;
pub use inline::{
    eliminate_by_resolution, inline_predicate, inline_single_definitions, remove_redundant, remove_redundant_indexed,
    remove_tautologies,
};
pub use quant::{instantiate, quantified_abstraction, AtomPos, InstantiationTemplate};
pub use reverse::reverse_rules;
pub use util::{resolve, simplify_clause};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("unknown constructor {0}")]
    UnknownConstructor(String),
    #[error("cannot merge {from} into {into}: signatures differ")]
    SignatureMismatch { from: String, into: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("nonlinear clause {0}: reversal needs at most one body atom")]
    Nonlinear(usize),
    #[error("no template for clause {clause} {pos}")]
    MissingTemplate { clause: usize, pos: AtomPos },
    #[error("template for clause {clause} {pos} has {found} terms, expected {expected}")]
    TemplateArity { clause: usize, pos: AtomPos, expected: usize, found: usize },
}
