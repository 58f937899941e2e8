use std::fmt;

/// CLI error classes, mapped to process exit codes: validation failures
/// exit 1, configuration errors exit 2, IO failures exit 3.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Config(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation failure: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<interference_core::CoreError> for CliError {
    fn from(e: interference_core::CoreError) -> Self {
        CliError::Config(e.to_string())
    }
}
