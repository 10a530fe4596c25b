use thiserror::Error;

/// Errors raised by the distribution, inference and oracle layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SnbError {
    #[error("domain error: {0}")]
    Domain(String),

    /// The mgf closed form is undefined for point-mass distributions.
    #[error("degenerate distribution (p = {p}): the mgf is exp(x*{k}); use that directly")]
    Degenerate { p: f64, k: u64 },

    #[error("trial already stopped: {0}")]
    TrialStopped(String),

    #[error("enumeration too large: s + t - 1 = {n} exceeds the bound of {max}")]
    Size { n: u64, max: u64 },

    #[error("accuracy error: {message} (best estimate {estimate:e})")]
    Accuracy { message: String, estimate: f64 },
}

impl SnbError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        SnbError::Domain(msg.into())
    }
}

pub type Result<T, E = SnbError> = std::result::Result<T, E>;
