use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const INPUT: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
    pub const CAP_REFUSAL: i32 = 5;
    pub const INTERNAL: i32 = 70;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] ils_summ::Error),

    #[error("{0}")]
    Output(String),

    #[error("instance has {shots} shots, above the exact-solver cap of {cap}; pass --force to run anyway")]
    CapRefusal { shots: usize, cap: usize },

    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Core(ils_summ::Error::Infeasible { .. }) => exit::INFEASIBLE,
            CliError::Core(ils_summ::Error::InvalidArgument(_)) => exit::USAGE,
            CliError::Core(_) | CliError::Output(_) => exit::INPUT,
            CliError::CapRefusal { .. } => exit::CAP_REFUSAL,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }
}
