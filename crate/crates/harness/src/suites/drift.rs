use anyhow::{Context, Result};
use pdfw_core::algorithms::run_pdfw;
use pdfw_core::diagnostics::{drift_test, DriftTestConfig};
use pdfw_core::model::{AlgoConfig, Schedule};

use super::{sigmoidal_instance, SuiteConfig};
use crate::plan::{GenKind, Generator, InstanceSource, Prepared};
use crate::report::{Check, SuiteReport};

/// Drift-lemma premises and conclusion on the queue-norm paths of the
/// `V = √T` runs, with window `t₀ = ⌈√T⌉`.
pub fn drift(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let inst = sigmoidal_instance();
    let prep = Prepared::load(&InstanceSource::Generated(Generator::new(GenKind::Sigmoidal, 0)))?;
    let eps = prep.slater.as_ref().context("sigmoidal instance is not Slater")?.margin;
    let mut report = SuiteReport::new("drift");
    for &t in &cfg.horizons {
        let base = AlgoConfig::scheduled(t, Schedule::SquareRoot, 0);
        let (v, eta) = base.params();
        let t0 = (t as f64).sqrt().ceil() as usize;
        let dc = DriftTestConfig::for_pdfw(&prep.bounds, eps, v, eta, t0);
        let seeds: Vec<u64> = (0..cfg.seeds).collect();
        let paths = cfg.exec.try_map(&seeds, |&s| {
            run_pdfw(&inst, &base.with_seed(s)).map(|r| r.trace.queue_norms())
        })?;
        let r = drift_test(&paths, &dc)?;
        report.push(Check::le(format!("queue step T={t}"), r.max_step, dc.delta_max));
        let detail = match r.decrease_ok {
            Some(_) => format!(
                "{} windows above {:.3e}, mean change {:.3e} se {:.1e}",
                r.windows, dc.lambda_threshold, r.window_mean, r.window_se
            ),
            None => format!("no window started above {:.3e}", dc.lambda_threshold),
        };
        report.push(Check::flag(
            format!("drift decrease T={t}"),
            r.decrease_ok.unwrap_or(true),
            detail,
        ));
        report.push(Check::le(format!("mean queue norm T={t}"), r.mean_level, r.level_bound));
    }
    Ok(report)
}
