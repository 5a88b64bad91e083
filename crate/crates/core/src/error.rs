use thiserror::Error;

use crate::element::ElementId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element {element} is outside the ground set of size {ground_size}")]
    OutOfRange { element: usize, ground_size: usize },

    #[error("element {0} is not alive in this view")]
    NotAlive(ElementId),

    #[error("element {0} is contracted in this view")]
    Contracted(ElementId),

    #[error("element {0} appears more than once in a query order")]
    DuplicateElement(ElementId),

    #[error("cannot contract a set that is dependent given the current contraction")]
    DependentContraction,

    #[error("per-round query budget exceeded after {rounds} rounds: batch would hold {attempted} queries (budget {budget})")]
    BudgetExceeded { rounds: u64, attempted: u64, budget: u64 },

    #[error("ticket {0} was redeemed before the batch containing it was flushed")]
    NotFlushed(u64),

    #[error("ticket {0} is unknown or was already redeemed")]
    UnknownTicket(u64),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
