use std::time::Instant;

use anyhow::Result;
use pdfw_core::algorithms::run_pdfw;
use pdfw_core::diagnostics::compute_bounds;
use pdfw_core::distributed::make_cycle_consensus;
use pdfw_core::model::{AlgoConfig, ProblemInstance, Schedule};
use pdfw_core::problems::{make_random_finite, ObjectiveFamily};

use super::{convex_instance, sigmoidal_instance};
use crate::report::{Check, SuiteReport};

const TOL: f64 = 1e-9;

fn instances() -> Result<Vec<ProblemInstance>> {
    let mut out = vec![convex_instance(), sigmoidal_instance()];
    out.push(make_cycle_consensus(4, 2, 0)?.stacked_instance()?);
    for k in 0..50u64 {
        let family = if k % 2 == 0 { ObjectiveFamily::Quadratic } else { ObjectiveFamily::Sigmoidal };
        let d = 1 + (k % 4) as usize;
        let states = 1 + (k % 3) as usize;
        let verts = 1 + (k % 4) as usize;
        let cons = (k % 4) as usize;
        out.push(make_random_finite(d, states, verts, cons, family, 1000 + k)?);
    }
    Ok(out)
}

/// Queue and averaging identities on every trace, `T ∈ {1, 7, 100}`.
pub fn identities() -> Result<SuiteReport> {
    let start = Instant::now();
    let insts = instances()?;
    let mut worst_queue_lb = 0.0f64;
    let mut worst_avg = 0.0f64;
    let mut worst_rec = 0.0f64;
    let mut worst_replay = 0.0f64;
    let mut min_q = f64::INFINITY;
    let mut worst_step_excess = f64::NEG_INFINITY;
    let mut runs = 0usize;
    for inst in &insts {
        let b = inst.bounds().cloned().unwrap_or_else(|| compute_bounds(inst)).b;
        for t in [1usize, 7, 100] {
            for seed in 0..4u64 {
                let cfgs = [
                    AlgoConfig::scheduled(t, Schedule::CubeRoot, seed),
                    AlgoConfig::scheduled(t, Schedule::SquareRoot, seed),
                    AlgoConfig::fixed(t, 3.0, 0.3, seed),
                ];
                for cfg in &cfgs {
                    let r = run_pdfw(inst, cfg)?;
                    let tr = &r.trace;
                    let c = inst.constraints();
                    if !c.is_empty() {
                        worst_queue_lb = worst_queue_lb.max(-tr.queue_lower_bound_slack(c));
                        min_q = min_q.min(tr.min_queue_entry());
                        // Relative excess: the step norm is itself computed with rounding.
                        worst_step_excess = worst_step_excess.max(tr.max_queue_step() / b - 1.0);
                    }
                    worst_avg = worst_avg.max(tr.averaging_identity_error());
                    worst_rec = worst_rec.max(tr.recursion_error());
                    worst_replay = worst_replay.max(tr.queue_replay_error(c));
                    runs += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let mut report = SuiteReport::new("identities");
    let detail = format!("{} instances, {runs} runs", insts.len());
    report.push(Check::le("queue lower bound deficit", worst_queue_lb, TOL).with_detail(detail));
    report.push(Check::le("averaging identity", worst_avg, TOL));
    report.push(Check::le("gamma recursion", worst_rec, TOL));
    report.push(Check::le("queue replay", worst_replay, 0.0));
    report.push(Check::ge("queue nonnegativity", min_q, 0.0));
    report.push(Check::le("queue step relative excess over B", worst_step_excess, 1e-12));
    report.push(Check::le("runtime seconds", elapsed, 1.0));
    Ok(report)
}
