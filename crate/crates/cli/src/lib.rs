//! Batch front-end: TOML run configurations, the `forward`, `asymptote`,
//! `invert` and `study` subcommands, and CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod output;
pub mod study;

pub use commands::{cmd_asymptote, cmd_forward, cmd_invert};
pub use config::{ConfigError, RawConfig, RunConfig};
pub use csvio::{CsvError, CsvMatrix};
pub use error::CliError;
pub use study::{cmd_study, loglog_slope};
