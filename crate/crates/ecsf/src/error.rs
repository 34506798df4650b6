use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A curve failed its structural invariants.
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// Two consecutive nodes coincide (or nearly so); stencils are undefined.
    #[error("degenerate node spacing at index {index}: spacing {spacing:e}")]
    DegenerateSpacing { index: usize, spacing: f64 },

    /// A seed failed the Ricci positivity validation.
    #[error(
        "Ricci condition violated: worst margin {margin:e} at node {index} \
         (eps1 = {eps1:e}, eps2 = {eps2:e})"
    )]
    RicciViolation {
        margin: f64,
        index: usize,
        eps1: f64,
        eps2: f64,
    },

    /// Geometry produced NaN or infinity; the flow cannot continue.
    #[error("non-finite geometry: {0}")]
    NonFinite(String),

    /// Configuration file or value rejected.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical fit could not be performed.
    #[error("fit failed: {0}")]
    FitFailed(String),

    /// Not enough data for the requested analysis.
    #[error("insufficient data: {0}")]
    Insufficient(String),

    /// Input rejected by an operation's precondition.
    #[error("rejected input: {0}")]
    Rejected(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {detail}")]
    Malformed { path: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(path: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            detail: detail.into(),
        }
    }
}
