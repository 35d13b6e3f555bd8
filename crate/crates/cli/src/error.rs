use thiserror::Error;

/// Failures that end a run; each maps to a process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ptsym_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Config and model-parameter problems are usage errors (2); the rest are failures (1).
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Model(e) if is_config_error(e) => 2,
            _ => 1,
        }
    }
}

fn is_config_error(e: &ptsym_core::Error) -> bool {
    use ptsym_core::Error as E;
    matches!(
        e,
        E::InvalidSpace(_)
            | E::BufferTooLarge { .. }
            | E::Conditioning { .. }
            | E::InvalidProfile(_)
            | E::InvalidParams(_)
            | E::InvalidIntegrator(_)
            | E::StepUnderflow { .. }
            | E::StateOutOfRange { .. }
            | E::SpectrumCount { .. }
    )
}
