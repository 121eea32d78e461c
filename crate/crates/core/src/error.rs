use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole: {0}")]
    Pole(String),
    #[error("degenerate symbol: {0}")]
    DegenerateSymbol(String),
    #[error("general position fails: {0}")]
    GeneralPosition(String),
    #[error("jet order exceeded while differentiating `{0}`")]
    JetOrderExceeded(String),
    #[error("no polynomial relations among the given invariants")]
    NoRelations,
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for failures that are mathematical outcomes rather than malformed input.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::DivisionByZero
                | Error::Pole(_)
                | Error::DegenerateSymbol(_)
                | Error::GeneralPosition(_)
                | Error::JetOrderExceeded(_)
                | Error::NoRelations
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
