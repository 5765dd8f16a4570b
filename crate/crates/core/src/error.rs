use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller combined options incorrectly.
    #[error("usage error: {0}")]
    Usage(String),

    /// The data do not carry enough information for the requested estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The implicit equation has no sign change on the scan grid.
    #[error("no root on the scan grid: g({theta_lo})={g_lo}, g({theta_hi})={g_hi}, target {target}")]
    NoRoot {
        theta_lo: f64,
        theta_hi: f64,
        g_lo: f64,
        g_hi: f64,
        target: f64,
    },

    /// The implicit equation has several roots; the caller has to choose.
    #[error("implicit equation has {} roots: {roots:?}", roots.len())]
    AmbiguousRoots { roots: Vec<f64> },

    /// Malformed input file or stream.
    #[error("input error at {location}: {message}")]
    Input { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// True for errors that stem from how the tool was invoked.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_))
    }
}
