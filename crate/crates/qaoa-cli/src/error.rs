use thiserror::Error;

/// Errors surfaced by the command-line front end.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Refused(String),
    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },
    #[error(transparent)]
    Calc(#[from] qaoa_calc::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status: 2 input error, 3 budget or size refusal, 4 verification failure.
    pub fn exit_code(&self) -> i32 {
        use qaoa_calc::Error as E;
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Refused(_) => 3,
            CliError::Verification { .. } => 4,
            CliError::Calc(e) => match e {
                E::SizeLimit { .. } | E::TermBudget { .. } | E::TermBudgetAt { .. } | E::SamplerBound { .. } => 3,
                _ => 2,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
