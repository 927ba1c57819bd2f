use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole at s = {sigma} + {t}i")]
    Pole { sigma: f64, t: f64 },
    #[error("X too small for these parameters: {0}")]
    XTooSmall(String),
    #[error("empty window: no integer in [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("degenerate interval: H(x) = {0} < 1")]
    DegenerateInterval(f64),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("grid too large: {0}")]
    GridTooLarge(String),
    #[error("resolution error: step {step} exceeds {max}")]
    Resolution { step: f64, max: f64 },
    #[error("precision exhausted deciding {0}")]
    PrecisionExhausted(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by asking for more work than the exact
    /// algorithms are allowed to do.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::GridTooLarge(_) | Error::XTooSmall(_) | Error::InsufficientData(_)
        )
    }
}
