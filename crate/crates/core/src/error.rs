use thiserror::Error;

/// Failure modes shared by every evaluation routine in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid precision configuration: {0}")]
    Config(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("target precision unreachable: {0}")]
    PrecisionUnreachable(String),
    #[error("series diverges: {0}")]
    Divergence(String),
    #[error("argument too close to a pole: {0}")]
    Pole(String),
    #[error("division by a vanishing quantity: {0}")]
    ZeroDivisor(String),
    #[error("degenerate evaluation point: {0}")]
    Degenerate(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
