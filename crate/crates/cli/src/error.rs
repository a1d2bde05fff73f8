use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("serialization: {0}")]
    Serialize(String),
    #[error(transparent)]
    Core(#[from] instanton_core::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;
