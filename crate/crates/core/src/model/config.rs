use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How `(V, η)` are derived from the horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Use the configured `V` and `η` as given.
    Fixed,
    /// `V = T^{1/3}`, `η = T^{-2/3}`.
    CubeRoot,
    /// `V = T^{1/2}`, `η = T^{-1/2}`.
    SquareRoot,
}

impl Schedule {
    pub fn name(self) -> &'static str {
        match self {
            Schedule::Fixed => "fixed",
            Schedule::CubeRoot => "cube_root",
            Schedule::SquareRoot => "square_root",
        }
    }
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(Schedule::Fixed),
            "cube_root" | "cuberoot" | "cube-root" => Ok(Schedule::CubeRoot),
            "square_root" | "squareroot" | "square-root" | "sqrt" => Ok(Schedule::SquareRoot),
            other => Err(Error::InvalidConfig(format!("unknown schedule `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    pub horizon: usize,
    pub v: f64,
    pub eta: f64,
    pub seed: u64,
    pub schedule: Schedule,
}

impl AlgoConfig {
    pub fn fixed(horizon: usize, v: f64, eta: f64, seed: u64) -> Self {
        Self {
            horizon,
            v,
            eta,
            seed,
            schedule: Schedule::Fixed,
        }
    }

    pub fn scheduled(horizon: usize, schedule: Schedule, seed: u64) -> Self {
        Self {
            horizon,
            v: 1.0,
            eta: 0.5,
            seed,
            schedule,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Effective `(V, η)` after applying the schedule.
    pub fn params(&self) -> (f64, f64) {
        let t = self.horizon as f64;
        match self.schedule {
            Schedule::Fixed => (self.v, self.eta),
            Schedule::CubeRoot => (t.cbrt(), t.powf(-2.0 / 3.0)),
            Schedule::SquareRoot => (t.sqrt(), 1.0 / t.sqrt()),
        }
    }

    /// `T >= 1`, `V > 0` and `0 < η < 1`. A schedule evaluated at `T = 1`
    /// yields `η = 1`, which is accepted: the single-slot run is then
    /// `γ_0 = x_0`.
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        let (v, eta) = self.params();
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidConfig(format!("V must be positive, got {v}")));
        }
        let eta_ok = match self.schedule {
            Schedule::Fixed => eta > 0.0 && eta < 1.0,
            _ => eta > 0.0 && eta <= 1.0,
        };
        if !eta_ok {
            return Err(Error::InvalidConfig(format!("eta must lie in (0, 1), got {eta}")));
        }
        Ok(())
    }
}
