//! Abductive query evaluation over ground extended logic programs.
//!
//! The crate evaluates queries to abductive frameworks — a program with
//! explicit and default negation, a set of abducible objective literals,
//! and integrity rules — under the well-founded semantics with explicit
//! negation. It does so by
//!
//! 1. building the *dual program*, which adds rules deriving `not O`
//!    exactly when `O` is false ([`dual`]);
//! 2. running a tabled evaluation with abductive contexts over the dual
//!    program ([`engine`]);
//! 3. cross-checking results against brute-force fixpoint computation
//!    ([`oracle`]).
//!
//! Generalized (partial) stable models are computed on top of abduction
//! through a shadow-rule reduction ([`gsm`]).
//!
//! Start with the runnable examples (`cargo run --example ...`) or the
//! `abdual` binary, which exposes each capability as a subcommand.

pub mod dual;
pub mod engine;
pub mod error;
pub mod framework;
pub mod gsm;
pub mod interp;
pub mod literal;
pub mod oracle;
pub mod parser;
pub mod program;
pub mod symbol;

pub mod cli;

pub use dual::{attach_query, dual_fold, dual_unfold, dual_size_check, DualProgram};
pub use engine::{run, EvalOptions, Evaluation};
pub use error::{EngineError, ModelError, OracleError, ParseError};
pub use framework::{AbductiveFramework, Scenario};
pub use interp::Interpretation;
pub use literal::{Literal, ObjectiveLiteral};
pub use parser::{parse_framework, parse_query, serialize};
pub use program::{Program, Rule};
pub use symbol::Symbol;
