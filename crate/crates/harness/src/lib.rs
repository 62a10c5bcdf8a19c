//! Experiment harness for `symtest-core`: configuration, seeded campaigns,
//! CSV tables and summary records.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod far;
pub mod generate;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind, Plan, SandwichCase};
pub use error::{HarnessError, Result};
pub use experiments::{run, Outcome};
pub use far::generate_far_function;
