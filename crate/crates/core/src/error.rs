use thiserror::Error;

/// Errors raised by the numerical layers of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TplabError {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("{function}: argument outside supported domain ({detail})")]
    Domain { function: &'static str, detail: String },

    #[error("{function}: requested accuracy {requested:e} not reached (estimate {achieved:e})")]
    Accuracy {
        function: &'static str,
        requested: f64,
        achieved: f64,
    },

    #[error("quadrature did not converge after {subdivisions} subdivisions: value {value}, error estimate {error:e}")]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("oscillatory integral did not settle: amplitude decays too slowly (partial value {value}, error estimate {error:e})")]
    SlowDecay { value: f64, error: f64 },

    #[error("expansion degenerate at {detail}")]
    DegenerateExpansion { detail: String },

    #[error("covariance matrix is not positive semidefinite (jitter up to {max_jitter:e} tried)")]
    NotPsd { max_jitter: f64 },

    #[error("circulant embedding has negative eigenvalue {min_eigenvalue:e} (relative {relative:e})")]
    EmbeddingFailure { min_eigenvalue: f64, relative: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl TplabError {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        TplabError::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(detail: impl Into<String>) -> Self {
        TplabError::InvalidParameter(detail.into())
    }

    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            TplabError::Accuracy { .. }
                | TplabError::NonConvergence { .. }
                | TplabError::SlowDecay { .. }
                | TplabError::NotPsd { .. }
                | TplabError::EmbeddingFailure { .. }
                | TplabError::DegenerateExpansion { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, TplabError>;
