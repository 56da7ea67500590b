use anyhow::{Context, Result};
use pdfw_core::diagnostics::{OPT_GAP_TOL, SLATER_MIN_MARGIN};
use pdfw_core::model::Schedule;

use super::{plan_for, slope_check, sweep, SuiteConfig};
use crate::plan::{Algorithm, GenKind, Prepared};
use crate::report::{Check, SuiteReport};

/// Slack allowed on the Lagrangian inequality of a multiplier certificate.
const LAGRANGE_TOL: f64 = 1e-7;

fn certificate_checks(prep: &Prepared, report: &mut SuiteReport) {
    match &prep.slater {
        Some(s) => report.push(Check::ge("slater margin", s.margin, SLATER_MIN_MARGIN)),
        None => report.push(Check::flag("slater margin", false, "no strictly feasible policy")),
    }
    if let Some(gs) = &prep.gamma_star {
        report.push(Check::le("gamma* fw gap", gs.gap, OPT_GAP_TOL));
    }
}

fn convex(cfg: &SuiteConfig, schedule: Schedule, name: &str) -> Result<SuiteReport> {
    let mut plan = plan_for(GenKind::Convex, Algorithm::Pdfw, cfg);
    plan.schedule = schedule;
    let prep = Prepared::load(&plan.source)?;
    let mut report = SuiteReport::new(name);
    certificate_checks(&prep, &mut report);
    if schedule == Schedule::SquareRoot {
        let lc = prep.lagrange.as_ref().context("convex instance without multipliers")?;
        report.push(
            Check::le("lagrange certificate", lc.checked_gap, LAGRANGE_TOL)
                .with_detail(format!("lambda={:?}", lc.lambda)),
        );
    }
    let mut series = Vec::new();
    for (row, cells) in sweep(&plan, &prep)? {
        for c in row.checks() {
            report.push(c);
        }
        let abs: Vec<f64> = cells.iter().filter_map(|c| c.subopt.map(f64::abs)).collect();
        series.push((row.horizon as f64, abs.iter().sum::<f64>() / abs.len() as f64));
    }
    if schedule == Schedule::SquareRoot {
        report.push(slope_check("suboptimality slope", &series, -0.4));
    }
    Ok(report)
}

/// `V = T^{1/3}` on the convex instance: suboptimality and per-constraint
/// violation of `x̄_T`.
pub fn convex_cube_root(cfg: &SuiteConfig) -> Result<SuiteReport> {
    convex(cfg, Schedule::CubeRoot, "convex-cube-root")
}

/// `V = √T` on the convex instance, with the multiplier bound and a rate fit
/// of the mean absolute suboptimality.
pub fn convex_square_root(cfg: &SuiteConfig) -> Result<SuiteReport> {
    convex(cfg, Schedule::SquareRoot, "convex-square-root")
}

fn nonconvex(cfg: &SuiteConfig, schedule: Schedule, name: &str) -> Result<SuiteReport> {
    let mut plan = plan_for(GenKind::Sigmoidal, Algorithm::Pdfw, cfg);
    plan.schedule = schedule;
    let prep = Prepared::load(&plan.source)?;
    let mut report = SuiteReport::new(name);
    certificate_checks(&prep, &mut report);
    for (row, _) in sweep(&plan, &prep)? {
        for c in row.checks() {
            report.push(c);
        }
    }
    Ok(report)
}

/// `V = T^{1/3}` on the sigmoidal instance: gap and squared distance of
/// `γ_α`, violations of `E_α γ_α`.
pub fn nonconvex_cube_root(cfg: &SuiteConfig) -> Result<SuiteReport> {
    nonconvex(cfg, Schedule::CubeRoot, "nonconvex-bounds")
}

/// `V = √T` on the sigmoidal instance with the Slater constants.
pub fn slater_square_root(cfg: &SuiteConfig) -> Result<SuiteReport> {
    nonconvex(cfg, Schedule::SquareRoot, "slater")
}
