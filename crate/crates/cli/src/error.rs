use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, detected before any simulation starts.
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Run(#[from] ticksim::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("estimator check failed: {0} mismatches")]
    Mismatch(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Mismatch(_) => 3,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }

    /// Core errors raised while validating a config.
    pub fn config(e: ticksim::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
