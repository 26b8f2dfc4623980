//! Configuration-driven scenarios over the `analog_sqed` library.

pub mod acceptance;
pub mod config;
pub mod output;
pub mod scenario;
pub mod table;
pub mod validate;

pub use config::{ConfigError, ScenarioConfig, ScenarioKind};
pub use scenario::{run, RunError};
pub use validate::{validate, ValidationReport};
