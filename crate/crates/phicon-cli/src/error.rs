use exact_algebra::AlgebraError;
use phicon::PhiError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error("malformed configuration: {0}")]
    MalformedConfig(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("this command needs a configuration file (--config)")]
    MissingConfig,
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("{0}")]
    Usage(String),
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Phi(PhiError::Algebra(e))
    }
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Phi(e) => e.code(),
            CliError::MalformedConfig(_) => "MalformedConfig",
            CliError::Io { .. } => "IoError",
            CliError::MissingConfig => "MissingConfig",
            CliError::MalformedInput(_) => "MalformedInput",
            CliError::BadArgument(_) => "BadArgument",
            CliError::Usage(_) => "UsageError",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut body = json!({ "code": self.code(), "message": self.to_string() });
        if let CliError::Phi(PhiError::FuchsViolation(defect)) = self {
            body["discrepancy"] = json!(defect);
        }
        json!({ "error": body })
    }
}

pub type CliResult<T> = Result<T, CliError>;
