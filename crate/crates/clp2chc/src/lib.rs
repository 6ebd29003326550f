//! Translate Prolog/CLP(Z) programs into SMT-LIB scripts of constrained
//! Horn clauses over a universal algebraic data type, and check the result
//! against a bounded bottom-up evaluator.
//!
//! The pipeline: [`syntax`] parses `.pl` sources, [`signatures`] collects
//! function and predicate signatures and assigns collision-free SMT-LIB
//! names, [`translator`] applies the translation judgements and assembles
//! a [`smtlib::Script`], and [`oracle`] answers bounded derivability
//! questions for differential testing against an external CHC solver.

pub mod diagnostics;
pub mod oracle;
pub mod signatures;
pub mod smtlib;
pub mod syntax;
pub mod translator;

pub use diagnostics::{Diagnostic, Severity, Span};
