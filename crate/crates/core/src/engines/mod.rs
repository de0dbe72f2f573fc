//! Decision procedures and certificates: the integer-arithmetic core, model
//! checking, Karr's affine-equality analysis, bounded refutation, the
//! nonrecursive solver, and the portfolio driver.

mod check;
mod karr;
pub mod lia;
mod nonrec;
mod refute;
mod solve;
mod value;

pub use check::{check_model, check_model_with_budget, CheckResult};
pub use karr::{karr_affine, karr_model, AffineSubspace, PredInvariant};
pub use lia::{lia_sat, lia_valid, Lia, LiaResult, Validity};
pub use nonrec::{project, solve_nonrecursive, NonrecError};
pub use refute::{
    bounded_refutation, bounded_refutation_with, derivable_facts, replay, Derivation, Refutation, ReplayError,
    SearchLimits, SymbolicFact,
};
pub use solve::{solve, Attempt, Engine, ExternalAnswer, SolveConfig, SolveOutcome, Strategy, Verdict};
pub use value::{complete, default_value, eval_formula, eval_lin, eval_term, Assignment, Value};
