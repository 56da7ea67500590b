use crate::algorithms::{run_pdfw, TwoPhaseResult};
use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::model::{AlgoConfig, ProblemInstance, RngStream, Series};

/// Output of the queue-free tracking phase.
#[derive(Clone, Debug, PartialEq)]
pub struct TrackingRun {
    pub states: Vec<usize>,
    pub xs: Series,
    /// `γ_0, ..., γ_{T-1}`.
    pub gammas: Series,
    pub x_bar: Vec<f64>,
    /// Largest deviation of `γ_t` from the running mean of `x_0..x_t`.
    pub identity_error: f64,
}

/// Frank-Wolfe with cost `γ_{t-1} − target` and step `1/(t+1)`, drawing
/// states from their own stream so phase 1 and phase 2 are independent.
pub fn run_tracking_fw(
    inst: &ProblemInstance,
    target: &[f64],
    horizon: usize,
    seed: u64,
) -> Result<TrackingRun> {
    check_dim("target", inst.dim(), target.len())?;
    if horizon == 0 {
        return Err(Error::InvalidConfig("horizon must be at least 1".into()));
    }
    if target.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("target must be finite".into()));
    }
    let d = inst.dim();
    let mut sampler = inst.state_model().sampler(seed, RngStream::TrackingStates);
    let mut states = Vec::with_capacity(horizon);
    let mut xs = Series::with_capacity(d, horizon);
    let mut gammas = Series::with_capacity(d, horizon);
    let mut gamma = vec![0.0; d];
    let mut cost = vec![0.0; d];
    let mut x = vec![0.0; d];
    let mut sum = vec![0.0; d];
    let mut identity_error = 0.0f64;
    for t in 0..horizon {
        let s = sampler.next_state();
        for j in 0..d {
            cost[j] = gamma[j] - target[j];
        }
        inst.decision_set(s).lmo_into(&cost, &mut x)?;
        let eta = 1.0 / (t as f64 + 1.0);
        for j in 0..d {
            gamma[j] = (1.0 - eta) * gamma[j] + eta * x[j];
            sum[j] += x[j];
            identity_error = identity_error.max((gamma[j] - sum[j] / (t as f64 + 1.0)).abs());
        }
        states.push(s);
        xs.push(&x);
        gammas.push(&gamma);
    }
    debug_assert!(identity_error <= 1e-9, "running-average identity off by {identity_error}");
    Ok(TrackingRun {
        states,
        xs,
        gammas,
        x_bar: sum.iter().map(|s| s / horizon as f64).collect(),
        identity_error,
    })
}

/// Runs PDFW for `T` slots, then tracks the randomized output `γ_α` for
/// another `T` slots with fresh states.
pub fn run_two_phase(inst: &ProblemInstance, cfg: &AlgoConfig) -> Result<TwoPhaseResult> {
    let phase1 = run_pdfw(inst, cfg)?;
    let target = phase1.gamma_alpha.clone();
    let tracking = run_tracking_fw(inst, &target, cfg.horizon, cfg.seed)?;
    Ok(TwoPhaseResult {
        tracking_error: linalg::dist(&tracking.x_bar, &target),
        phase2_xbar: tracking.x_bar,
        target,
        phase1,
    })
}
