use std::time::Instant;

use crate::algorithms::RunResult;
use crate::error::{Error, Result};
use crate::model::{
    rng_stream, uniform_index, AlgoConfig, ProblemInstance, QueueState, RngStream, RunTrace,
    Series, Stepper,
};

/// Drives the slot loop shared by all queue-based runners: draws states,
/// lets `choose` pick `x_t` from `(state, γ_{t-1}, Q(t))`, then applies the
/// averaging and queue updates and draws the output index.
pub fn simulate<F>(
    inst: &ProblemInstance,
    v: f64,
    eta: f64,
    horizon: usize,
    seed: u64,
    mut choose: F,
) -> Result<RunResult>
where
    F: FnMut(usize, &[f64], &QueueState, &mut [f64]) -> Result<()>,
{
    if horizon == 0 {
        return Err(Error::InvalidConfig("horizon must be at least 1".into()));
    }
    let start = Instant::now();
    let d = inst.dim();
    let c = inst.constraints();
    let mut sampler = inst.state_model().sampler(seed, RngStream::States);
    let mut states = Vec::with_capacity(horizon);
    let mut xs = Series::with_capacity(d, horizon);
    let mut gammas = Series::with_capacity(d, horizon + 1);
    let mut queues = Vec::with_capacity(horizon + 1);
    let mut gamma = vec![0.0; d];
    let mut q = QueueState::zeros(c.len());
    let mut x = vec![0.0; d];
    let mut x_sum = vec![0.0; d];
    gammas.push(&gamma);
    queues.push(q.clone());
    for _ in 0..horizon {
        let s = sampler.next_state();
        choose(s, &gamma, &q, &mut x)?;
        for j in 0..d {
            gamma[j] = (1.0 - eta) * gamma[j] + eta * x[j];
            x_sum[j] += x[j];
        }
        q.advance(&x, c);
        states.push(s);
        xs.push(&x);
        gammas.push(&gamma);
        queues.push(q.clone());
    }
    let x_bar: Vec<f64> = x_sum.iter().map(|s| s / horizon as f64).collect();
    let mut alpha_rng = rng_stream(seed, RngStream::Alpha);
    let idx = uniform_index(&mut alpha_rng, horizon);
    let gamma_alpha = gammas.row(idx).to_vec();
    let trace = RunTrace {
        v,
        eta,
        states,
        xs,
        gammas,
        queues,
        x_bar,
        alpha: idx as isize - 1,
        gamma_alpha,
    };
    Ok(RunResult::from_trace(inst, trace, start.elapsed().as_secs_f64()))
}

/// Primal-dual Frank-Wolfe over `cfg.horizon` slots from `γ_{-1} = 0`,
/// `Q(0) = 0`.
pub fn run_pdfw(inst: &ProblemInstance, cfg: &AlgoConfig) -> Result<RunResult> {
    cfg.validate()?;
    let (v, eta) = cfg.params();
    let mut stepper = Stepper::new(inst, v, eta);
    simulate(inst, v, eta, cfg.horizon, cfg.seed, |s, gamma, q, x| {
        stepper.decide(s, gamma, q, x)
    })
}

/// Primal-dual gradient method: PDFW with `V = 1/β`, `η = β`.
pub fn run_pd_gradient(
    inst: &ProblemInstance,
    beta: f64,
    horizon: usize,
    seed: u64,
) -> Result<RunResult> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidConfig(format!("beta must lie in (0, 1), got {beta}")));
    }
    run_pdfw(inst, &AlgoConfig::fixed(horizon, 1.0 / beta, beta, seed))
}
