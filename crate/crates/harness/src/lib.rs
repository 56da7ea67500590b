//! Experiment runner for `pdfw-core`: instance files, sweep plans with CSV
//! reports, and the verification suites behind `pdfw verify`.

pub mod instance_file;
pub mod plan;
pub mod report;
pub mod suites;

pub use plan::{run_plan, Algorithm, ExperimentPlan, GenKind, Generator, InstanceSource};
pub use report::{Check, SuiteReport};
pub use suites::{run_suite, Suite, SuiteConfig};
