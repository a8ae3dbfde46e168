use qat::{ExpansionError, MetricsError, OracleError, PropagatorError, SystemError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("expansion failed: {0}")]
    Expansion(#[from] ExpansionError),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("{failed} of {total} acceptance criteria failed")]
    Verification { failed: usize, total: usize },
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Expansion(_) => 2,
            CliError::Integration(_) => 3,
            CliError::Verification { .. } => 4,
            CliError::Output(_) => 5,
        }
    }
}

impl From<SystemError> for CliError {
    fn from(e: SystemError) -> Self {
        CliError::Config(format!("invalid system: {e}"))
    }
}

impl From<PropagatorError> for CliError {
    fn from(e: PropagatorError) -> Self {
        match e {
            PropagatorError::Expansion(inner) => CliError::Expansion(inner),
            other => CliError::Integration(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Integration(format!("exact integrator: {e}"))
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Integration(e.to_string())
    }
}
