use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("incomplete POVM: effects sum deviates from identity by {deviation:e}")]
    IncompletePovm { deviation: f64 },

    #[error("non-positive effect {index}: minimum eigenvalue {min_eigenvalue:e}")]
    NonPositiveEffect { index: usize, min_eigenvalue: f64 },

    /// A closed-form expression hit a vanishing denominator.
    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
