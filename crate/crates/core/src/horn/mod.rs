//! Constrained Horn clauses over linear integer arithmetic and algebraic
//! data types: the pipeline's intermediate representation.

pub mod canon;
mod clause;
mod formula;
mod linear;
mod model;
mod provenance;
mod system;
mod term;
mod validate;

pub use clause::{Clause, Head, PredApp};
pub use formula::{CmpOp, Formula, LinAtom, Rel};
pub use linear::LinExpr;
pub use model::{default_params, Applied, Case, Interp, Model, ModelError, PatternElem};
pub use provenance::{back_translate, renamings, Step};
pub use system::{Constructor, Datatype, HornError, HornSystem, PredDecl};
pub use term::{Sort, Subst, Term};
pub use validate::{validate, Defect, Rule};
