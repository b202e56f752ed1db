use thiserror::Error;

use crate::numerics::NumericsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("gap is not finite at g = {g}")]
    NonFiniteGap { g: f64 },
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("N = {n} exceeds the dense spin-basis limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("ground level is degenerate within the even-parity sector at t = {time}")]
    DegenerateGround { time: f64 },
    #[error("spectral degeneracy with non-zero coupling at g = {g}")]
    SpectralDegeneracy { g: f64 },
    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
