use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{certify_slater, compute_bounds};
use crate::error::{Error, Result};
use crate::model::{
    rng_stream, DecisionSet, LinearConstraints, Objective, ProblemInstance, RngStream,
    SigmoidalUtility, StateModel,
};

const SLATER_RETRIES: usize = 100;

/// Single-state instance with a fixed vertex set.
pub fn make_deterministic(
    vertices: Vec<Vec<f64>>,
    objective: Objective,
    constraints: LinearConstraints,
) -> Result<ProblemInstance> {
    let set = DecisionSet::finite(vertices)?;
    let inst = ProblemInstance::new(
        "deterministic",
        StateModel::deterministic(),
        vec![set],
        objective,
        constraints,
    )?;
    let bounds = compute_bounds(&inst);
    Ok(inst.with_bounds(bounds))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveFamily {
    Quadratic,
    Sigmoidal,
}

fn random_probabilities(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|r| r / total).collect();
    // Put the rounding residue on the last state so the sum is exact.
    let head: f64 = p[..n - 1].iter().sum();
    p[n - 1] = 1.0 - head;
    p
}

/// Opportunistic scheduling: in each state the scheduler serves one user at
/// a random rate in `[0.2, 1]` or idles. Per-user average-power caps
/// `γ_i <= b_i` sit between 30% and 80% of that user's best mean rate.
fn scheduling(
    d: usize,
    n_states: usize,
    seed: u64,
    family: ObjectiveFamily,
) -> Result<ProblemInstance> {
    if d == 0 || n_states == 0 {
        return Err(Error::InvalidConfig("need d >= 1 and at least one state".into()));
    }
    let mut rng = rng_stream(seed, RngStream::Generator);
    for _ in 0..SLATER_RETRIES {
        let probs = random_probabilities(&mut rng, n_states);
        let mut sets = Vec::with_capacity(n_states);
        let mut best_mean = vec![0.0; d];
        for &p in &probs {
            let mut verts = vec![vec![0.0; d]];
            for j in 0..d {
                let rate = rng.random_range(0.2..1.0);
                let mut v = vec![0.0; d];
                v[j] = rate;
                verts.push(v);
                best_mean[j] += p * rate;
            }
            sets.push(DecisionSet::finite(verts)?);
        }
        let rows: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                e
            })
            .collect();
        let rhs: Vec<f64> = best_mean.iter().map(|m| m * rng.random_range(0.3..0.8)).collect();
        let objective = match family {
            ObjectiveFamily::Quadratic => {
                Objective::quadratic((0..d).map(|_| rng.random_range(0.0..1.0)).collect())
            }
            ObjectiveFamily::Sigmoidal => Objective::Sigmoidal(SigmoidalUtility::uniform(d)),
        };
        let name = match family {
            ObjectiveFamily::Quadratic => format!("convex-d{d}-s{n_states}-{seed}"),
            ObjectiveFamily::Sigmoidal => format!("sigmoidal-d{d}-s{n_states}-{seed}"),
        };
        let inst = ProblemInstance::new(
            name,
            StateModel::from_probabilities(probs)?,
            sets,
            objective,
            LinearConstraints::new(d, rows, rhs)?,
        )?;
        if certify_slater(&inst, &inst.mixture_polytope())?.is_some() {
            let bounds = compute_bounds(&inst);
            return Ok(inst.with_bounds(bounds));
        }
    }
    Err(Error::Generation(format!(
        "no Slater-feasible draw in {SLATER_RETRIES} attempts"
    )))
}

/// Scheduling instance with `f(γ) = ‖γ − g‖²`, `g` uniform in `[0,1]^d`.
pub fn make_convex_scheduling(d: usize, n_states: usize, seed: u64) -> Result<ProblemInstance> {
    scheduling(d, n_states, seed, ObjectiveFamily::Quadratic)
}

/// Scheduling instance with the sigmoidal utility at its default
/// parameters.
pub fn make_sigmoidal_scheduling(d: usize, n_states: usize, seed: u64) -> Result<ProblemInstance> {
    scheduling(d, n_states, seed, ObjectiveFamily::Sigmoidal)
}

/// Small random instance for oracle cross-checks: every state holds the
/// origin plus `n_vertices − 1` points of `[0,1]^d`, and each of the
/// `n_constraints` rows has entries in `[−1,1]` with `b` in `[0.05, 0.5]`,
/// so the origin is always feasible.
pub fn make_random_finite(
    d: usize,
    n_states: usize,
    n_vertices: usize,
    n_constraints: usize,
    family: ObjectiveFamily,
    seed: u64,
) -> Result<ProblemInstance> {
    if d == 0 || n_states == 0 || n_vertices == 0 {
        return Err(Error::InvalidConfig("empty random instance".into()));
    }
    let mut rng = rng_stream(seed, RngStream::Generator);
    let probs = random_probabilities(&mut rng, n_states);
    let mut sets = Vec::with_capacity(n_states);
    for _ in 0..n_states {
        let mut verts = vec![vec![0.0; d]];
        for _ in 1..n_vertices {
            verts.push((0..d).map(|_| rng.random_range(0.0..1.0)).collect());
        }
        sets.push(DecisionSet::finite(verts)?);
    }
    let rows: Vec<Vec<f64>> = (0..n_constraints)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let rhs: Vec<f64> = (0..n_constraints).map(|_| rng.random_range(0.05..0.5)).collect();
    let objective = match family {
        ObjectiveFamily::Quadratic => {
            Objective::quadratic((0..d).map(|_| rng.random_range(0.0..1.0)).collect())
        }
        ObjectiveFamily::Sigmoidal => Objective::Sigmoidal(SigmoidalUtility::with_params(
            d,
            1.0,
            rng.random_range(4.0..12.0),
            rng.random_range(0.2..0.6),
        )),
    };
    let inst = ProblemInstance::new(
        format!("random-{seed}"),
        StateModel::from_probabilities(probs)?,
        sets,
        objective,
        LinearConstraints::new(d, rows, rhs)?,
    )?;
    let bounds = compute_bounds(&inst);
    Ok(inst.with_bounds(bounds))
}
