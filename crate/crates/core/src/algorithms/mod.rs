//! Full-horizon runners.

mod dpp;
mod pdfw;
mod result;
mod tracking;

pub use dpp::run_dpp;
pub use pdfw::{run_pd_gradient, run_pdfw, simulate};
pub use result::{RunResult, TwoPhaseResult};
pub use tracking::{run_tracking_fw, run_two_phase, TrackingRun};
