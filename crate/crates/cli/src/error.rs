use thiserror::Error;

/// Process exit statuses.
pub mod status {
    pub const SUCCESS: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const NON_CONVERGENCE: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] pointer_entropy::Error),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),

    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("cannot write JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn exit_status(&self) -> u8 {
        use pointer_entropy::Error as E;
        match self {
            Self::Config(_) | Self::Core(E::Domain(_) | E::Capability(_)) => status::CONFIG,
            Self::Core(E::NonConvergence { .. }) => status::NON_CONVERGENCE,
            _ => status::NUMERICAL,
        }
    }
}
