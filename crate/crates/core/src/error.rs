use thiserror::Error;

/// Errors raised by construction, transforms, generators and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value sequence is empty")]
    Empty,

    #[error("value at n = {0} is not finite")]
    NonFinite(usize),

    #[error("negative probability {value} at n = {n}")]
    NegativeProbability { n: usize, value: f64 },

    #[error("normalization violated: sum of probabilities is {0}")]
    NormalizationViolation(f64),

    #[error("distribution has no positive entry")]
    ZeroDistribution,

    #[error("window too short: index {needed} required, window ends at {nmax}")]
    WindowTooShort { needed: usize, nmax: usize },

    #[error("factorial moment of order {0} does not converge inside the window")]
    DivergentTail(usize),

    #[error("degenerate cat state: zero intensity with relative phase pi is the null vector")]
    DegenerateCat,

    #[error("probability at n = {0} underflows double precision; shorten the window")]
    Underflow(usize),

    #[error("quadrature did not converge for moment {0}")]
    QuadratureNotConverged(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
