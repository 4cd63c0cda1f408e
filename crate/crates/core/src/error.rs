//! Crate-wide error type.

use crate::expr::ExprError;
use crate::grid::GridError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AerError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("Assumption {number} violated: {detail}")]
    Assumption { number: u8, detail: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<AerError>,
    },
}

impl AerError {
    pub fn assumption(number: u8, detail: impl Into<String>) -> Self {
        Self::Assumption {
            number,
            detail: detail.into(),
        }
    }

    pub fn numerical(detail: impl Into<String>) -> Self {
        Self::Numerical(detail.into())
    }

    pub fn invalid(detail: impl Into<String>) -> Self {
        Self::InvalidInput(detail.into())
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Self::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error beneath any stage labels.
    pub fn root(&self) -> &AerError {
        match self {
            Self::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_assumption(&self) -> bool {
        matches!(self.root(), Self::Assumption { .. })
    }
}

pub type Result<T, E = AerError> = std::result::Result<T, E>;
