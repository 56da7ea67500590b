use std::fmt;

/// One verified property: a measured value against a bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `measured <= bound`.
    pub fn le(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            passed: measured <= bound,
            detail: String::new(),
        }
    }

    /// Passes when `measured >= bound`.
    pub fn ge(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            passed: measured >= bound,
            ..Self::le(name, measured, bound)
        }
    }

    /// Mean with standard error against a bound, allowing 3 standard errors.
    pub fn mean_le(name: impl Into<String>, mean: f64, se: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured: mean,
            bound,
            passed: mean <= bound + 3.0 * se,
            detail: format!("se={se:.3e}"),
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            measured: if ok { 1.0 } else { 0.0 },
            bound: 1.0,
            passed: ok,
            detail: detail.into(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        let d = detail.into();
        self.detail = if self.detail.is_empty() { d } else { format!("{} {d}", self.detail) };
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "  [{}] {}: {:.6e} vs {:.6e}",
            if self.passed { "ok" } else { "FAIL" },
            self.name,
            self.measured,
            self.bound
        )?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: SuiteReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n_ok = self.checks.iter().filter(|c| c.passed).count();
        writeln!(
            f,
            "{} {}: {}/{} checks passed",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            n_ok,
            self.checks.len()
        )?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
