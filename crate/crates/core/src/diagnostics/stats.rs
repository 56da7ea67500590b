use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanSe {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                se: f64::NAN,
                n,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, se, n }
    }

    /// One-sided test `mean <= bound + 3·SE`.
    pub fn within(&self, bound: f64) -> bool {
        self.mean <= bound + 3.0 * self.se
    }
}

/// Least-squares slope of `ln(error)` against `ln(T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Horizons whose error was not positive and so were left out.
    pub excluded: Vec<f64>,
}

pub fn fit_rate(series: &[(f64, f64)]) -> crate::Result<RateFit> {
    let mut excluded = Vec::new();
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter_map(|&(t, e)| {
            if e > 0.0 && e.is_finite() && t > 0.0 {
                Some((t.ln(), e.ln()))
            } else {
                excluded.push(t);
                None
            }
        })
        .collect();
    if pts.len() < 3 {
        return Err(crate::Error::InvalidConfig(format!(
            "rate fit needs at least 3 positive points, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(crate::Error::InvalidConfig("rate fit needs distinct horizons".into()));
    }
    let slope = sxy / sxx;
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_examples() {
        let ts = [10.0, 100.0, 1000.0, 10000.0];
        let inv: Vec<_> = ts.iter().map(|&t| (t, 3.0 / t)).collect();
        assert!((fit_rate(&inv).unwrap().slope + 1.0).abs() < 1e-12);
        let sqrt: Vec<_> = ts.iter().map(|&t: &f64| (t, 2.0 / t.sqrt())).collect();
        assert!((fit_rate(&sqrt).unwrap().slope + 0.5).abs() < 1e-12);
        let flat: Vec<_> = ts.iter().map(|&t| (t, 0.7)).collect();
        assert!(fit_rate(&flat).unwrap().slope.abs() < 1e-12);
    }

    #[test]
    fn rate_excludes_nonpositive() {
        let s = [(10.0, 1.0), (100.0, 0.0), (1000.0, 0.01), (10000.0, 0.001)];
        let fit = fit_rate(&s).unwrap();
        assert_eq!(fit.excluded, vec![100.0]);
        assert!(fit_rate(&s[..3]).is_err());
    }

    #[test]
    fn mean_se() {
        let m = MeanSe::of(&[1.0, 2.0, 3.0]);
        assert_eq!(m.mean, 2.0);
        assert!((m.se - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(m.within(0.3));
        assert!(!m.within(0.2));
    }
}
