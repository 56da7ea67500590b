//! Verification suites. Each returns a [`SuiteReport`]; the CLI `verify`
//! subcommand and the acceptance tests both call into here.

mod baselines;
mod bounds;
mod brute;
mod distributed;
mod drift;
mod identities;
mod oracles;
mod tracking;

use anyhow::{Context, Result};
use clap::ValueEnum;
use pdfw_core::diagnostics::{fit_rate, RateFit};
use pdfw_core::exec::Exec;
use pdfw_core::model::ProblemInstance;
use pdfw_core::problems::{make_convex_scheduling, make_sigmoidal_scheduling};

use crate::plan::{
    bound_set, run_cell, summarize, Algorithm, CellResult, ExperimentPlan, GenKind, Generator,
    InstanceSource, Prepared, SummaryRow,
};
use crate::report::{Check, SuiteReport};

pub use baselines::baselines;
pub use bounds::{convex_cube_root, convex_square_root, nonconvex_cube_root, slater_square_root};
pub use brute::BruteHull;
pub use distributed::distributed;
pub use drift::drift;
pub use identities::identities;
pub use oracles::{oracle_equivalence, perturbation};
pub use tracking::tracking;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    ConvexBounds,
    NonconvexBounds,
    Slater,
    Distributed,
    Perturbation,
    Drift,
    Tracking,
    Oracles,
    Baselines,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seeds: u64,
    /// Strictly increasing; slope fits need at least three.
    pub horizons: Vec<usize>,
    pub exec: Exec,
}

impl SuiteConfig {
    pub fn full() -> Self {
        Self {
            seeds: 200,
            horizons: vec![1_000, 10_000, 100_000],
            exec: Exec::Parallel,
        }
    }

    /// Smaller sweep for smoke runs.
    pub fn quick() -> Self {
        Self {
            seeds: 20,
            horizons: vec![500, 2_000, 8_000],
            exec: Exec::Parallel,
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match suite {
        Suite::Identities => identities(),
        Suite::ConvexBounds => {
            let mut r = convex_cube_root(cfg)?;
            r.extend(convex_square_root(cfg)?);
            r.name = "convex-bounds".into();
            Ok(r)
        }
        Suite::NonconvexBounds => nonconvex_cube_root(cfg),
        Suite::Slater => slater_square_root(cfg),
        Suite::Distributed => distributed(cfg),
        Suite::Perturbation => perturbation(),
        Suite::Drift => drift(cfg),
        Suite::Tracking => tracking(cfg),
        Suite::Oracles => oracle_equivalence(),
        Suite::Baselines => baselines(cfg),
    }
}

/// Convex scheduling instance used by the convex suites.
pub fn convex_instance() -> ProblemInstance {
    make_convex_scheduling(3, 3, 0).expect("fixed generator seed")
}

/// Sigmoidal scheduling instance used by the non-convex suites.
pub fn sigmoidal_instance() -> ProblemInstance {
    make_sigmoidal_scheduling(3, 3, 0).expect("fixed generator seed")
}

pub(crate) fn plan_for(kind: GenKind, algorithm: Algorithm, cfg: &SuiteConfig) -> ExperimentPlan {
    let mut plan = ExperimentPlan::new(
        InstanceSource::Generated(Generator::new(kind, 0)),
        algorithm,
        std::env::temp_dir(),
    );
    plan.horizons = cfg.horizons.clone();
    plan.seeds = cfg.seeds;
    plan.exec = cfg.exec;
    plan
}

/// Runs the plan's cells in memory and summarizes each horizon.
pub(crate) fn sweep(
    plan: &ExperimentPlan,
    prep: &Prepared,
) -> Result<Vec<(SummaryRow, Vec<CellResult>)>> {
    plan.validate()?;
    plan.validate_against(prep)?;
    let mut out = Vec::new();
    for &t in &plan.horizons {
        let seeds: Vec<u64> = (0..plan.seeds).collect();
        let cells = plan.exec.try_map(&seeds, |&s| {
            run_cell(plan, prep, t, s)
                .map(|(c, _)| c)
                .with_context(|| format!("T = {t}, seed = {s}"))
        })?;
        let refs: Vec<&CellResult> = cells.iter().collect();
        let row = summarize(&refs, bound_set(plan, prep, t)?);
        out.push((row, cells));
    }
    Ok(out)
}

/// Fits `ln err ~ ln T` and checks the slope.
pub(crate) fn slope_check(name: &str, series: &[(f64, f64)], max_slope: f64) -> Check {
    match fit_rate(series) {
        Ok(RateFit { slope, excluded, .. }) => {
            let mut c = Check::le(name, slope, max_slope);
            let pts: Vec<String> = series.iter().map(|(t, e)| format!("{t}:{e:.3e}")).collect();
            c.detail = format!("points {}", pts.join(" "));
            if !excluded.is_empty() {
                c.detail.push_str(&format!(" excluded {excluded:?}"));
            }
            c
        }
        Err(e) => Check::flag(name, false, format!("fit failed: {e}")),
    }
}
