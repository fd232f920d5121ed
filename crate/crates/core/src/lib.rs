//! Constrained Horn clause solving by induction on derivations.

#![allow(clippy::should_implement_trait, clippy::too_many_arguments, clippy::type_complexity)]

pub mod certificate;
pub mod clause;
pub mod cli;
pub mod engine;
pub mod frontend;
pub mod oracle;
pub mod sexp;
pub mod smt;
pub mod term;
