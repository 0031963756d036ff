use std::path::PathBuf;

use powerbin_core::PricingError;

/// Everything that ends a command early, tagged with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Contract {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(PricingError),
    #[error("{0}")]
    Unsupported(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Contract { .. } | CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Unsupported(_) => 4,
            CliError::Io { .. } => 5,
        }
    }
}

impl From<PricingError> for CliError {
    fn from(e: PricingError) -> Self {
        match e {
            PricingError::Unsupported(what) => CliError::Unsupported(what.to_string()),
            other => CliError::Numeric(other),
        }
    }
}
