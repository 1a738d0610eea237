use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain size mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: usize, found: usize },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("value {value} out of range for domain of size {domain}")]
    ValueOutOfRange { value: usize, domain: usize },

    #[error("relation arity must be positive")]
    NullaryRelation,

    #[error("relation of arity {arity} over a domain of size {domain} is too large to store")]
    RelationTooLarge { domain: usize, arity: usize },

    #[error("operation table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },

    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: String,
        budget: u64,
    },

    #[error("ragged tuple list: expected inner length {expected}, found {found}")]
    RaggedTuples { expected: usize, found: usize },

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable {0} is not part of the instance")]
    VariableOutOfRange(usize),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("program is not linear: rule {0} has more than one IDB body atom")]
    NonLinear(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid format: {0}")]
    Format(String),

    #[error("width {needed} exceeds the available width {available}")]
    WidthTooSmall { needed: usize, available: usize },

    #[error("missing inner derivation for constraint {0}")]
    MissingInnerDerivation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid Hagemann-Mitschke chain: {0}")]
    InvalidHmChain(String),

    #[error("derivation replay failed at step {step}: {reason}")]
    Replay { step: usize, reason: String },

    #[error("predicate family does not contain {0}")]
    FamilyTooSmall(String),

    #[error("invalid path decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("inconsistent result: {0}")]
    Inconsistent(String),

    #[error("unsupported export: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub(crate) fn budget_error(what: impl Into<String>, needed: impl ToString, budget: u64) -> Error {
    Error::BudgetExceeded {
        what: what.into(),
        needed: needed.to_string(),
        budget,
    }
}
