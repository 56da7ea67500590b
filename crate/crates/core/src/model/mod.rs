//! Domain types, the per-state linear-minimization oracle, the virtual-queue
//! update and the single-slot primal-dual Frank-Wolfe step.

mod config;
mod constraints;
mod decision;
mod instance;
mod objective;
mod queue;
mod state;
mod step;
mod trace;

pub use config::{AlgoConfig, Schedule};
pub use constraints::LinearConstraints;
pub use decision::{lmo, DecisionSet};
pub use instance::ProblemInstance;
pub use objective::{CustomObjective, Objective, SigmoidalUtility};
pub use queue::{queue_update, QueueState};
pub use state::{rng_stream, uniform01, uniform_index, RngStream, StateModel, StateSampler};
pub use step::{pdfw_cost, pdfw_step, StepOutput, Stepper};
pub use trace::{RunTrace, Series};
