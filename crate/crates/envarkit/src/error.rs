use thiserror::Error;

/// Failures that end a run with exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("ParseError: {0}")]
    Parse(String),
    #[error("{0}")]
    Core(#[from] envarkit_core::Error),
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }
}
