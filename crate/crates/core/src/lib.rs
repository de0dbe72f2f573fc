//! Verification of small higher-order functional programs through
//! constrained Horn clauses, with closures encoded as algebraic data types.
//!
//! The pipeline: [`frontend`] parses and types a `.hof` program, [`encoder`]
//! defunctionalizes it into a [`horn::HornSystem`], [`transforms`] rewrite the
//! clauses, and [`engines`] decide satisfiability with certificates. [`io`]
//! covers SMT-LIB, model and template files, and external solvers.

pub mod encoder;
pub mod engines;
pub mod frontend;
pub mod horn;
pub mod io;
pub mod transforms;
