//! Checkable logic problems: a brute-force oracle, answer-text parsing and SMT-LIB export.

mod answer;
mod oracle;
mod problem;
mod semantic;
mod smt;
mod solver;

use thiserror::Error;

pub use answer::parse_assignment;
pub use oracle::{
    bijection_violations, brute_force_solve, horn_least_model, horn_violations, solve_horn_open, verify_answer,
    violations, Truth, Verdict, Violated,
};
pub use problem::{
    AssignmentAnswer, BijectionConstraint, BijectionProblem, HornProblem, HornRule, Literal, LogicProblem,
    MAX_BIJECTION, MAX_HORN_VARS,
};
pub use semantic::{assess_semantics, SemanticAssessment, SemanticSource};
pub use smt::{emit_smtlib, SmtScripts};
pub use solver::{find_solver, run_solver, SolverError, SolverVerdict, DEFAULT_TIMEOUT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("duplicate {what}: {name}")]
    Duplicate { what: &'static str, name: String },
    #[error("{entities} entities but {values} values")]
    SizeMismatch { entities: usize, values: usize },
    #[error("undeclared {what}: {name}")]
    Undeclared { what: &'static str, name: String },
    #[error("problem size {size} exceeds the oracle limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("invalid problem json: {0}")]
    Json(String),
}
