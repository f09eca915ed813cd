//! Scenario runner for `tlsim`: JSON configs in, CSV datasets and
//! checksum manifests out.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod figures;
pub mod manifest;
pub mod run;
pub mod solvers;
pub mod sweep;

pub use config::{ScenarioConfig, Solver, SweepAxis, SweepSpec};
pub use error::{CliError, Result};
pub use figures::reproduce_figure;
pub use run::run_scenario;
