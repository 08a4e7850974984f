//! Sweep configuration, execution and report emission behind the `poincare`
//! binary.

pub mod config;
pub mod report;
pub mod sweep;

pub use config::{ConfigError, ConfigFile, Format, SweepConfig};
pub use report::{Report, Row, Status, Summary};
