use serde::{Deserialize, Serialize};

use crate::diagnostics::bounds::BoundConstants;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftTestConfig {
    pub t0: usize,
    pub delta_max: f64,
    pub xi: f64,
    pub lambda_threshold: f64,
}

impl DriftTestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t0 == 0 || !(self.xi > 0.0 && self.xi < self.delta_max) {
            return Err(Error::InvalidConfig(format!(
                "drift test needs t0 >= 1 and 0 < xi < delta_max, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Parameters for a PDFW queue process on a Slater instance with
    /// margin `eps`: `δ = B`, `ξ = ε/2` and the threshold
    /// `((VLηD² + B² + 2VMD)t₀ + 4VK/η + εBt₀² + ε²t₀²)/(εt₀)`.
    pub fn for_pdfw(bc: &BoundConstants, eps: f64, v: f64, eta: f64, t0: usize) -> Self {
        let t0f = t0 as f64;
        let lambda = ((v * bc.l * eta * bc.d * bc.d + bc.b * bc.b + 2.0 * v * bc.m * bc.d) * t0f
            + 4.0 * v * bc.k / eta
            + eps * bc.b * t0f * t0f
            + eps * eps * t0f * t0f)
            / (eps * t0f);
        Self {
            t0,
            delta_max: bc.b,
            xi: eps / 2.0,
            lambda_threshold: lambda,
        }
    }

    /// Uniform bound on `E Z(t)` implied by the drift conditions.
    pub fn expectation_bound(&self) -> f64 {
        let (d, xi) = (self.delta_max, self.xi);
        self.lambda_threshold
            + (4.0 * d * d / xi)
                * self.t0 as f64
                * (1.0 + (8.0 * d * d / (xi * xi)) * (xi / (4.0 * d)).exp()).ln()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    /// Largest `|Z(t+1) − Z(t)|` seen.
    pub max_step: f64,
    pub step_ok: bool,
    /// Windows starting above the threshold.
    pub windows: usize,
    pub window_mean: f64,
    pub window_se: f64,
    /// `None` when no window started above the threshold.
    pub decrease_ok: Option<bool>,
    pub mean_level: f64,
    pub level_bound: f64,
    pub level_ok: bool,
}

impl DriftReport {
    pub fn passed(&self) -> bool {
        self.step_ok && self.decrease_ok.unwrap_or(true) && self.level_ok
    }
}

/// Checks the drift-lemma premises and conclusion on one or more sample
/// paths of a nonnegative process, pooling windows across paths.
pub fn drift_test(paths: &[Vec<f64>], cfg: &DriftTestConfig) -> Result<DriftReport> {
    cfg.validate()?;
    let mut max_step = 0.0f64;
    let mut incr = Vec::new();
    let mut level_sum = 0.0;
    let mut level_n = 0usize;
    for z in paths {
        for w in z.windows(2) {
            max_step = max_step.max((w[1] - w[0]).abs());
        }
        for t in 0..z.len().saturating_sub(cfg.t0) {
            if z[t] > cfg.lambda_threshold {
                incr.push(z[t + cfg.t0] - z[t]);
            }
        }
        level_sum += z.iter().sum::<f64>();
        level_n += z.len();
    }
    let stats = crate::diagnostics::MeanSe::of(&incr);
    let decrease_ok = if incr.is_empty() {
        None
    } else {
        Some(stats.mean <= -(cfg.t0 as f64) * cfg.xi / 2.0 + 3.0 * stats.se)
    };
    let mean_level = if level_n > 0 { level_sum / level_n as f64 } else { 0.0 };
    let level_bound = cfg.expectation_bound();
    Ok(DriftReport {
        max_step,
        step_ok: max_step <= cfg.delta_max * (1.0 + 1e-12),
        windows: incr.len(),
        window_mean: stats.mean,
        window_se: stats.se,
        decrease_ok,
        mean_level,
        level_bound,
        level_ok: mean_level <= level_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rng_stream, uniform01, RngStream};

    #[test]
    fn always_decreasing_process() {
        let mut rng = rng_stream(3, RngStream::Generator);
        let mut z = vec![0.0];
        for _ in 0..10_000 {
            let u = -1.0 + 0.5 * uniform01(&mut rng);
            z.push((z.last().unwrap() + u).max(0.0));
        }
        let cfg = DriftTestConfig {
            t0: 5,
            delta_max: 1.0,
            xi: 0.5,
            lambda_threshold: 1.0,
        };
        let r = drift_test(&[z], &cfg).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.decrease_ok, None);
    }

    #[test]
    fn biased_walk() {
        let mut rng = rng_stream(4, RngStream::Generator);
        let mut z = vec![0.0f64];
        for _ in 0..1_000_000 {
            let cur = *z.last().unwrap();
            // Step down with probability 0.75 above the threshold, which
            // gives drift -0.5 per slot.
            let p_down = if cur > 10.0 { 0.75 } else { 0.5 };
            let step = if uniform01(&mut rng) < p_down { -1.0 } else { 1.0 };
            z.push((cur + step).max(0.0));
        }
        let cfg = DriftTestConfig {
            t0: 1,
            delta_max: 1.0,
            xi: 0.5,
            lambda_threshold: 10.0,
        };
        let r = drift_test(&[z], &cfg).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.windows > 0);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = DriftTestConfig {
            t0: 1,
            delta_max: 1.0,
            xi: 1.5,
            lambda_threshold: 0.0,
        };
        assert!(drift_test(&[vec![0.0]], &cfg).is_err());
    }
}
