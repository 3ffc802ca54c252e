use thiserror::Error;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no bound state: {0}")]
    NoBoundState(String),

    #[error("discriminant condition has no real root in k")]
    ComplexRoots,

    #[error("no branch of pi(z) gives tau'(z) < 0")]
    NoValidBranch,

    #[error("quantization residual has no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("non-finite sample at x = {0}")]
    NonFinite(f64),

    #[error("division by zero in terminating hypergeometric series at term {0}")]
    DivisionByZero(usize),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("grid too coarse: estimated relative error {estimate:.3e} exceeds {limit:.1e}; refine to at least {suggested_points} points")]
    GridTooCoarse {
        estimate: f64,
        limit: f64,
        suggested_points: usize,
    },

    #[error("grid too short: eigenfunction tail {tail:.3e} at the outer boundary")]
    GridTooShort { tail: f64 },

    #[error("wavefunction is not square integrable: {0}")]
    NonIntegrable(String),

    #[error("fixture integrity: {0}")]
    Fixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
