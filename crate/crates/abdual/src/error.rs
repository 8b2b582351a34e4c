//! Error types shared across the crate.

use std::fmt;

/// Errors raised by the core model types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    /// A reserved symbol was used where a user-language atom is required.
    ReservedSymbol(String),
    /// An abduced set contains an explicit-conjugate pair.
    InconsistentScenario(String),
    /// A framework invariant was violated.
    InvalidFramework(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::ReservedSymbol(name) => {
                write!(f, "reserved symbol `{name}` may not be used here")
            }
            ModelError::InconsistentScenario(what) => {
                write!(f, "inconsistent scenario: {what}")
            }
            ModelError::InvalidFramework(what) => write!(f, "invalid framework: {what}"),
        }
    }
}

impl std::error::Error for ModelError {}

/// A position in parser input, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourcePos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Parse errors, each carrying the position of the offending token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: SourcePos,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    /// A variable (uppercase or `_`-initial token) was found.
    NonGround(String),
    /// A rule head is declared abducible.
    AbducibleHead(String),
    /// A reserved symbol appeared in user input.
    ReservedSymbol(String),
    /// The query is not a single literal.
    QueryShape(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "{}: syntax error: {msg}", self.pos),
            ParseErrorKind::NonGround(tok) => {
                write!(f, "{}: non-ground term `{tok}` (variables are not supported)", self.pos)
            }
            ParseErrorKind::AbducibleHead(name) => {
                write!(f, "{}: rule head `{name}` is declared abducible", self.pos)
            }
            ParseErrorKind::ReservedSymbol(name) => {
                write!(f, "{}: reserved symbol `{name}` in user program", self.pos)
            }
            ParseErrorKind::QueryShape(msg) => {
                write!(f, "{}: query must be a single literal: {msg}", self.pos)
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// Errors raised by the reference oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    /// The abducible set is too large to enumerate exhaustively.
    TooManyAbducibles { count: usize, limit: usize },
    /// A literal of the wrong shape was supplied.
    Shape(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooManyAbducibles { count, limit } => {
                write!(f, "{count} abducibles exceed the enumeration guard ({limit})")
            }
            OracleError::Shape(msg) => write!(f, "shape error: {msg}"),
        }
    }
}

impl std::error::Error for OracleError {}

/// Errors raised by the tabled evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineError {
    /// The operation counter exceeded the theoretical bound or the step
    /// budget. Either way this signals a defect, not a user error.
    BugAssertion(String),
    Model(ModelError),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::BugAssertion(msg) => write!(f, "internal assertion failed: {msg}"),
            EngineError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for EngineError {}

impl From<ModelError> for EngineError {
    fn from(e: ModelError) -> Self {
        EngineError::Model(e)
    }
}
