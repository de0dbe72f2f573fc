//! Serialization (SMT-LIB HORN scripts, model and template files), the
//! external-solver client, solver reports and pipeline configuration.

mod external;
mod model_file;
mod pipeline;
mod report;
mod sexpr;
mod smtlib;
mod syntax;
mod templates;

use thiserror::Error;

pub use external::{run_external_solver, EXTERNAL_SOLVER_ENV};
pub use model_file::{parse_model, write_model};
pub use pipeline::{apply_step, load_system, parse_steps, run_solve, PipelineConfig, PipelineError, TransformStep};
pub use report::{tool_version, Certificate, SolverReport};
pub use sexpr::{parse_all, Loc, SExpr};
pub use smtlib::{emit_smtlib, emitted_pred_names, parse_smtlib};
pub use syntax::{formula_to_smt, lin_to_smt, term_to_smt};
pub use templates::{parse_templates, write_templates};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{loc}: {msg}")]
    Syntax { loc: Loc, msg: String },
    #[error("{loc}: outside the supported fragment: {msg}")]
    Fragment { loc: Loc, msg: String },
    #[error("system contains quantified atoms; instantiate them first")]
    QuantifiedAtoms,
    #[error("ill-formed system: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("external solver: {0}")]
    External(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
