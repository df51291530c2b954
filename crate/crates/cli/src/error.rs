use std::fmt::Display;

/// Failures of a CLI run, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent configuration (exit 2).
    #[error("config error: {0}")]
    Config(String),
    /// The run itself failed (exit 3). Divergence is not a failure.
    #[error("runtime failure: {0}")]
    Runtime(String),
}

impl CliError {
    /// A config error attributed to `field`.
    pub fn config(field: &str, msg: impl Display) -> Self {
        CliError::Config(format!("{field}: {msg}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<petviashvili::Error> for CliError {
    fn from(e: petviashvili::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("output: {e}"))
    }
}
