use thiserror::Error;

/// Library-wide error type. Validation failures carry enough context to
/// name the offending element, pair or triple.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("axiom violation: {0}")]
    Axiom(String),

    #[error("size bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("mismatched carriers: {0}")]
    CarrierMismatch(String),

    #[error("iteration cap reached: {0}")]
    NotConverged(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
