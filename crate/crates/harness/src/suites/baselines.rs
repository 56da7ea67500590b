use anyhow::Result;
use pdfw_core::algorithms::{run_pd_gradient, run_pdfw};
use pdfw_core::diagnostics::{dist_to_polytope, fw_gap, theorems};
use pdfw_core::distributed::{run_distributed, DistributedProblem, GraphTopology, Node};
use pdfw_core::model::{pdfw_step, AlgoConfig, LinearConstraints, ProblemInstance, QueueState, Schedule};
use pdfw_core::problems::{make_random_finite, ObjectiveFamily};

use super::{convex_instance, sigmoidal_instance, slope_check, SuiteConfig};
use crate::report::{Check, SuiteReport};

/// Membership checks per run: at most this many LP residuals and a tenth as
/// many projections, evenly spaced.
const MEMBERSHIP_SAMPLES: usize = 2000;

fn deterministic_instances() -> Result<Vec<ProblemInstance>> {
    (0..4)
        .map(|s| Ok(make_random_finite(2, 1, 3, 1, ObjectiveFamily::Sigmoidal, s)?))
        .collect()
}

/// Replays a trace slot by slot with the single-step function.
fn replay_matches(inst: &ProblemInstance, cfg: &AlgoConfig, trace: &pdfw_core::model::RunTrace) -> Result<bool> {
    let mut gamma = vec![0.0; inst.dim()];
    let mut q = QueueState::zeros(inst.constraints().len());
    for t in 0..trace.horizon() {
        let out = pdfw_step(inst, cfg, &gamma, &q, trace.states[t])?;
        if out.x != trace.x(t) || out.gamma != trace.gamma(t as isize) || &out.queue != trace.queue(t + 1) {
            return Ok(false);
        }
        gamma = out.gamma;
        q = out.queue;
    }
    Ok(true)
}

/// Baseline equivalences and the deterministic corollaries.
pub fn baselines(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("baselines");
    let dets = deterministic_instances()?;

    let pd_insts = [convex_instance(), sigmoidal_instance(), dets[0].clone()];
    let mut pd_equal = true;
    for inst in &pd_insts {
        for beta in [0.05, 0.2, 0.7] {
            for seed in 0..3 {
                let a = run_pd_gradient(inst, beta, 400, seed)?;
                let fixed = AlgoConfig::fixed(400, 1.0 / beta, beta, seed);
                let b = run_pdfw(inst, &fixed)?;
                pd_equal &= a.trace == b.trace && replay_matches(inst, &fixed, &a.trace)?;
            }
        }
    }
    report.push(Check::flag("pd-gradient equals pdfw(1/beta, beta)", pd_equal, "27 runs, T = 400"));

    let base = convex_instance();
    let node = Node {
        decision_sets: base.decision_sets().to_vec(),
        objective: base.objective().clone(),
    };
    let single = DistributedProblem::new(
        GraphTopology::new(1, vec![])?,
        base.state_model().clone(),
        vec![node],
        vec![],
        vec![],
    )?;
    let central = ProblemInstance::new(
        "single-node",
        base.state_model().clone(),
        base.decision_sets().to_vec(),
        base.objective().clone(),
        LinearConstraints::none(base.dim()),
    )?;
    let mut single_equal = true;
    for seed in 0..4 {
        let c = AlgoConfig::scheduled(2000, Schedule::CubeRoot, seed);
        single_equal &= run_distributed(&single, &c)?.trace == run_pdfw(&central, &c)?.trace;
    }
    report.push(Check::flag("single-node distributed equals centralized", single_equal, "4 seeds"));

    let mut worst_l1 = 0.0f64;
    let mut worst_dist = 0.0f64;
    for (k, inst) in dets.iter().enumerate() {
        let poly = inst.mixture_polytope();
        let bc = inst.bounds().cloned().expect("generated instances carry bounds");
        for schedule in [Schedule::CubeRoot, Schedule::SquareRoot] {
            let mut series = Vec::new();
            for &t in &cfg.horizons {
                let r = run_pdfw(inst, &AlgoConfig::scheduled(t, schedule, 0))?;
                let tr = &r.trace;
                let stride = (t / MEMBERSHIP_SAMPLES).max(1);
                for (n, s) in (0..t).step_by(stride).enumerate() {
                    let g = tr.gamma(s as isize);
                    worst_l1 = worst_l1.max(poly.l1_residual(g)?);
                    if n % 10 == 0 {
                        worst_dist = worst_dist.max(dist_to_polytope(&poly, g)?);
                    }
                }
                // E_α G(γ_α), exactly, over the uniform output index.
                let mut sum = 0.0;
                for s in 0..t {
                    sum += fw_gap(inst, &poly, tr.gamma(s as isize - 1))?;
                }
                let mean_gap = sum / t as f64;
                let bound = match schedule {
                    Schedule::SquareRoot => theorems::deterministic_square_root_gap(&bc, t as f64),
                    _ => theorems::nonconvex_cube_root(&bc, t as f64, 0.0).0,
                };
                report.push(Check::le(
                    format!("det{k} {} mean gap T={t}", schedule.name()),
                    mean_gap,
                    bound,
                ));
                series.push((t as f64, mean_gap));
            }
            let max_slope = if schedule == Schedule::SquareRoot { -0.4 } else { -0.25 };
            report.push(slope_check(
                &format!("det{k} {} gap slope", schedule.name()),
                &series,
                max_slope,
            ));
        }
    }
    report.push(Check::le("deterministic gamma_t l1 residual", worst_l1, 1e-9));
    report.push(Check::le("deterministic gamma_t distance", worst_dist, 1e-6));
    Ok(report)
}
