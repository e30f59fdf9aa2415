use thiserror::Error;

/// Errors raised by the numerical and combinatorial routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// Parameter combination rejected by a precondition.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Genuine pole of a gamma quotient.
    #[error("pole: {0}")]
    Pole(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("range error: {0}")]
    Range(String),
    /// A configured size cap (nodes, terms) would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    /// Sampled input carries energy beyond the requested band limit.
    #[error("aliasing: {0}")]
    Aliasing(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("normalization violated: {0}")]
    Normalization(String),
    /// Analytic continuation is not available for this input.
    #[error("continuation: {0}")]
    Continuation(String),
    #[error("step size: {0}")]
    StepSize(String),
}

pub type Result<T> = std::result::Result<T, Error>;
