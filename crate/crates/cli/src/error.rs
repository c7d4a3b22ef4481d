//! Process-level error split: configuration problems exit with 2, numerical
//! failures inside an otherwise valid run exit with 3.

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<gangs_core::Error> for CliError {
    fn from(e: gangs_core::Error) -> Self {
        match e {
            gangs_core::Error::Numerical(m) => CliError::Numerical(format!("numerical failure: {m}")),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io error: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
