use std::io;
use std::path::PathBuf;

use rdmgeo::eigen::EigenError;
use rdmgeo::meanfield::MeanFieldError;
use rdmgeo::oracle::OracleError;
use rdmgeo::ruling::RulingError;
use rdmgeo::spinops::SpinOpsError;
use rdmgeo::sweep::SweepError;
use thiserror::Error;

/// Failure of a command. The exit code contract is 1 for configuration and
/// input problems, 2 for numerical failures.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot {action} {}: {source}", path.display())]
    Io { action: &'static str, path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub fn io(action: &'static str, path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { action, path, source }
    }
}

impl From<SpinOpsError> for CliError {
    fn from(e: SpinOpsError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        match e {
            EigenError::NotConverged { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Eigen(inner) => inner.into(),
            SweepError::FaceTooLarge(_) | SweepError::DimensionMismatch { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<RulingError> for CliError {
    fn from(e: RulingError) -> Self {
        match e {
            RulingError::EmptyBody | RulingError::DegeneratePolyline(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<MeanFieldError> for CliError {
    fn from(e: MeanFieldError) -> Self {
        match e {
            MeanFieldError::DegenerateHull { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Config(e.to_string())
    }
}
