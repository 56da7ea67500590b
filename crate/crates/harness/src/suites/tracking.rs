use anyhow::Result;
use pdfw_core::algorithms::{run_tracking_fw, run_two_phase};
use pdfw_core::diagnostics::{theorems, MeanSe};
use pdfw_core::model::{AlgoConfig, Schedule};

use super::{sigmoidal_instance, SuiteConfig};
use crate::report::{Check, SuiteReport};

/// Two-phase scheme on the sigmoidal instance. The per-seed error
/// `‖x̄_T − γ_α‖` upper-bounds `‖E[x̄_T] − γ_α‖` in mean, so it is checked
/// against the bound directly.
pub fn tracking(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let inst = sigmoidal_instance();
    let bc = inst.bounds().cloned().expect("generated instances carry bounds");
    let mut report = SuiteReport::new("tracking");
    for &t in &cfg.horizons {
        let seeds: Vec<u64> = (0..cfg.seeds).collect();
        let rows = cfg.exec.try_map(&seeds, |&s| -> Result<(f64, f64, bool)> {
            let r = run_two_phase(&inst, &AlgoConfig::scheduled(t, Schedule::CubeRoot, s))?;
            let replay = run_tracking_fw(&inst, &r.target, t, s)?;
            let same = replay.x_bar == r.phase2_xbar && r.recomputed_error() == r.tracking_error;
            Ok((r.tracking_error, replay.identity_error, same))
        })?;
        let err = MeanSe::of(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
        report.push(Check::mean_le(
            format!("tracking error T={t}"),
            err.mean,
            err.se,
            theorems::tracking(&bc, t as f64),
        ));
        let ident = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        report.push(Check::le(format!("running-average identity T={t}"), ident, 1e-9));
        report.push(Check::flag(
            format!("tracking replay T={t}"),
            rows.iter().all(|r| r.2),
            "phase 2 reproduces from (target, seed)",
        ));
    }
    Ok(report)
}
