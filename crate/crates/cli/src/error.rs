use rydyn::Error;

/// Command failure, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid configuration or input data (exit code 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// File system failure (exit code 3).
    #[error("I/O error: {0}")]
    Io(String),
    /// A solver did not converge (exit code 4).
    #[error("solver error: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Solver(_) => 4,
        }
    }

    /// Prefixes the message with the context it arose in.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{what}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{what}: {m}")),
            CliError::Solver(m) => CliError::Solver(format!("{what}: {m}")),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::SelectionRule(_) | Error::Data { .. } => CliError::Config(e.to_string()),
            Error::Convergence(_) | Error::Integration { .. } => CliError::Solver(e.to_string()),
        }
    }
}

pub fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
