//! Scenario files, built-in reference scenarios and result export for the
//! incoherent-interferometer simulator.

pub mod builtins;
pub mod config;
pub mod error;
pub mod export;
pub mod scenario;

pub use builtins::{builtin, builtin_scenarios};
pub use config::{parse_config, ScenarioConfig};
pub use error::CliError;
pub use scenario::{run_config, run_scenario, LedgerEcho, OutputBundle};
