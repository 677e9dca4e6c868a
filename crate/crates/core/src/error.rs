use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    /// An operation on ordinary operators received an operator containing `∂`.
    #[error("operator is not an ordinary (∂̄-only) operator")]
    NotOrdinary,

    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),

    /// The diagonal reduction found no mixing coefficient within the search bound.
    #[error("Jacobson reduction incomplete: no mixing coefficient found for diagonal pair of orders {left} and {right}")]
    DecompositionIncomplete { left: u32, right: u32 },

    #[error("constraint module did not stabilize within {max_k} steps")]
    BudgetExceeded { max_k: usize },

    #[error("degenerate rank in Pfaffian reduction: {0}")]
    DegenerateRank(String),

    #[error("second-syzygy expansion failed: {0}")]
    ExpansionFailure(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),
}
