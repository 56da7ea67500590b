use anyhow::Result;
use pdfw_core::algorithms::run_pdfw;
use pdfw_core::distributed::{make_cycle_consensus, run_distributed, GraphTopology};
use pdfw_core::linalg;
use pdfw_core::model::{AlgoConfig, Schedule};

use super::{slope_check, SuiteConfig};
use crate::report::{Check, SuiteReport};

/// Four-node cycle sharing one scalar: consensus residual of the
/// seed-averaged `E_α β^{(i)}_α` and exact agreement with the stacked run.
pub fn distributed(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let prob = make_cycle_consensus(4, 2, 0)?;
    let mut report = SuiteReport::new("distributed");
    report.push(Check::flag(
        "topology",
        prob.graph == GraphTopology::cycle(4)? && prob.theta_dim() == 1,
        "4-cycle, p = 1",
    ));
    let stacked = prob.stacked_instance()?;
    let mut exact = true;
    let mut slack = f64::INFINITY;
    for seed in 0..4 {
        let c = AlgoConfig::scheduled(1000, Schedule::CubeRoot, seed);
        let a = run_distributed(&prob, &c)?;
        exact &= a.trace == run_pdfw(&stacked, &c)?.trace;
        slack = slack.min(a.edge_queue_slack());
    }
    report.push(Check::flag("stacked equivalence", exact, "4 seeds, T = 1000"));
    report.push(Check::ge("edge queue lower bound", slack, -1e-9));

    let n = prob.n_nodes();
    let mut series = Vec::new();
    for &t in &cfg.horizons {
        let seeds: Vec<u64> = (0..cfg.seeds).collect();
        let means = cfg.exec.try_map(&seeds, |&s| -> Result<Vec<Vec<f64>>> {
            let r = run_distributed(&prob, &AlgoConfig::scheduled(t, Schedule::CubeRoot, s))?;
            Ok((0..n).map(|i| r.beta_path_mean(i)).collect())
        })?;
        let avg: Vec<Vec<f64>> = (0..n)
            .map(|i| linalg::mean_rows(means.iter().map(|m| m[i].as_slice()), prob.theta_dim()))
            .collect();
        let resid = prob
            .graph
            .edges()
            .iter()
            .map(|&(i, j)| linalg::max_abs_diff(&avg[i], &avg[j]))
            .fold(0.0, f64::max);
        series.push((t as f64, resid));
    }
    report.push(slope_check("consensus residual slope", &series, -0.25));
    Ok(report)
}
