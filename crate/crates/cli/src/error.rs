use basmajian_core::Error;

/// Failures of a command, each with a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    /// 2 for a diverging series, 3 for degenerate or invalid input and failed
    /// root searches, 4 for lost continuation, 1 for IO and parse failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                Error::Diverging { .. } => 2,
                Error::LostTrack { .. } | Error::NonLoxodromic { .. } => 4,
                Error::Singular
                | Error::ParabolicOrElliptic
                | Error::DegenerateConfiguration(_)
                | Error::BranchAmbiguity
                | Error::NoConvergence
                | Error::NoSignChange
                | Error::NotClosed
                | Error::InvalidInput(_) => 3,
            },
            CliError::Config(_) => 3,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
