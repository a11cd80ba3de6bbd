use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the supported range of a function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("no bifurcation in range: stable solution count stays below 2 up to drive {cap}")]
    NoBifurcation { cap: f64 },

    /// `r2 - dtilde <= 0`: the optomechanical damping is not positive at positive frequency.
    #[error("not cooling: r2 - dtilde = {0} (must be > 0)")]
    NotCooling(f64),

    #[error("unstable fixed point: max Re(lambda) = {0}")]
    Unstable(f64),

    #[error("grid too coarse: spacing {spacing} exceeds {limit}")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("no cooling in range: optomechanical damping is never positive")]
    NoCoolingInRange,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
