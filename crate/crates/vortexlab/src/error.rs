use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Schema(String),
    #[error("enumeration: {0}")]
    Budget(String),
    #[error("no seed in the config or on the command line")]
    MissingSeed,
    #[error(transparent)]
    Core(vortex_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<vortex_core::Error> for HarnessError {
    fn from(e: vortex_core::Error) -> Self {
        match e {
            vortex_core::Error::Budget { .. } => Self::Budget(e.to_string()),
            other => Self::Core(other),
        }
    }
}

impl HarnessError {
    /// Process exit status: 2 for schema violations, 3 for an exceeded
    /// enumeration budget, 4 for a missing seed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Schema(_) => 2,
            Self::Budget(_) => 3,
            Self::MissingSeed => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
