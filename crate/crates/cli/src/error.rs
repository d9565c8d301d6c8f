use thiserror::Error;
use tplab::TplabError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Numeric(#[from] TplabError),
    #[error("validation failed: {0} of {1} checks")]
    ValidationFailed(usize, usize),
}

impl CliError {
    /// 1 validation failure, 2 usage or configuration, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ValidationFailed(..) => 1,
            CliError::Numeric(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::ValidationFailed(1, 3).exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(
            CliError::Numeric(TplabError::InvalidParameter("x".into())).exit_code(),
            2
        );
        assert_eq!(
            CliError::Numeric(TplabError::NotPsd { max_jitter: 1e-10 }).exit_code(),
            3
        );
        assert_eq!(
            CliError::Numeric(TplabError::SlowDecay { value: 0.0, error: 1.0 }).exit_code(),
            3
        );
    }
}
