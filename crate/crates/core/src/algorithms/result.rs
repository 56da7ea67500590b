use crate::linalg;
use crate::model::{ProblemInstance, RunTrace};

#[derive(Clone, Debug)]
pub struct RunResult {
    pub trace: RunTrace,
    pub f_xbar: f64,
    /// `⟨a_i, x̄_T⟩ − b_i` per constraint.
    pub violations: Vec<f64>,
    pub gamma_alpha: Vec<f64>,
    /// Seconds spent in the slot loop. Not part of the reproducible output.
    pub wallclock: f64,
}

impl RunResult {
    pub(crate) fn from_trace(inst: &ProblemInstance, trace: RunTrace, wallclock: f64) -> Self {
        Self {
            f_xbar: inst.objective().value(&trace.x_bar),
            violations: inst.constraints().residuals(&trace.x_bar),
            gamma_alpha: trace.gamma_alpha.clone(),
            trace,
            wallclock,
        }
    }

    pub fn max_violation(&self) -> f64 {
        self.violations.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest gap between the stored violations and a recomputation from
    /// the trace.
    pub fn violation_replay_error(&self, inst: &ProblemInstance) -> f64 {
        linalg::max_abs_diff(&inst.constraints().residuals(&self.trace.x_bar), &self.violations)
    }
}

#[derive(Clone, Debug)]
pub struct TwoPhaseResult {
    pub phase1: RunResult,
    pub target: Vec<f64>,
    pub phase2_xbar: Vec<f64>,
    /// `‖x̄_T − γ_α‖` for the tracking phase.
    pub tracking_error: f64,
}

impl TwoPhaseResult {
    pub fn recomputed_error(&self) -> f64 {
        linalg::dist(&self.phase2_xbar, &self.target)
    }
}
