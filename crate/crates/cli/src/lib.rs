//! Scenario-driven checks for the `modindex` library.
//!
//! A scenario is a JSON file of declarations and checks; [`run::run_scenario`]
//! executes it and [`report::emit`] renders the result.

pub mod build;
pub mod checks;
pub mod report;
pub mod run;
pub mod scenario;

pub use report::{emit, Format};
pub use run::{run_scenario, validate, CheckReport, Report, RunOptions, Status};
pub use scenario::{Scenario, ScenarioError};
