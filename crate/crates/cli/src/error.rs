//! CLI failures and their exit statuses.

use crate::config::ConfigError;
use crate::csvio::CsvError;
use aer_core::AerError;
use std::path::PathBuf;
use thiserror::Error;

pub const EXIT_ASSUMPTION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: CsvError },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Aer(#[from] AerError),
    /// Assumption checks failed; the report has been written.
    #[error("{0}")]
    AssumptionReport(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::File { .. } | Self::Csv { .. } | Self::Json { .. } => {
                EXIT_CONFIG
            }
            Self::AssumptionReport(_) => EXIT_ASSUMPTION,
            Self::Aer(e) => match e.root() {
                AerError::Assumption { .. } => EXIT_ASSUMPTION,
                AerError::InvalidInput(_) | AerError::Expr(_) => EXIT_CONFIG,
                _ => EXIT_NUMERICAL,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        let staged = AerError::assumption(3, "slope bound").in_stage("front");
        assert_eq!(CliError::from(staged).exit_code(), 2);
        assert_eq!(CliError::from(AerError::numerical("cg")).exit_code(), 3);
        assert_eq!(
            CliError::from(ConfigError::UnknownPreset("x".into())).exit_code(),
            4
        );
    }
}
