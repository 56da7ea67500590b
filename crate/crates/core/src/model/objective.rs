use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm};

/// User-supplied smooth objective. Implementations without closed-form
/// bounds on a box return `None` from [`CustomObjective::box_bounds`]; the
/// bound calculator then falls back to sampled (non-certified) estimates.
pub trait CustomObjective: Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient_into(&self, x: &[f64], out: &mut [f64]);
    fn smoothness(&self) -> f64;
    fn is_convex(&self) -> bool;
    fn box_bounds(&self, _lower: &[f64], _upper: &[f64]) -> Option<(f64, f64)> {
        None
    }
}

/// Logistic utility summed over users, in minimization form:
/// `f(γ) = -Σ_j c_j / (1 + exp(-a_j (γ_j - x0_j)))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmoidalUtility {
    pub amplitude: Vec<f64>,
    pub steepness: Vec<f64>,
    pub threshold: Vec<f64>,
}

impl SigmoidalUtility {
    /// Defaults: amplitude 1, steepness 10, threshold 0.5 for every user.
    pub fn uniform(d: usize) -> Self {
        Self::with_params(d, 1.0, 10.0, 0.5)
    }

    pub fn with_params(d: usize, amplitude: f64, steepness: f64, threshold: f64) -> Self {
        Self {
            amplitude: vec![amplitude; d],
            steepness: vec![steepness; d],
            threshold: vec![threshold; d],
        }
    }
}

#[inline]
fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// A smooth objective `f: R^d -> R` with its gradient, a gradient-Lipschitz
/// constant and closed-form bounds on boxes where available.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    /// `<c, γ>`
    Linear { c: Vec<f64> },
    /// `weight * ||γ - target||²`
    Quadratic { target: Vec<f64>, weight: f64 },
    /// `½ γᵀHγ + <c, γ>` with symmetric `H`.
    QuadraticForm {
        hessian: Vec<Vec<f64>>,
        linear: Vec<f64>,
    },
    Sigmoidal(SigmoidalUtility),
    /// Separable sum over contiguous coordinate blocks.
    BlockSum { blocks: Vec<Objective> },
    #[serde(skip)]
    Custom(Arc<dyn CustomObjective>),
}

impl Objective {
    pub fn quadratic(target: Vec<f64>) -> Self {
        Objective::Quadratic {
            target,
            weight: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            Objective::Linear { c } => {
                if c.is_empty() || !finite(c) {
                    return Err(Error::InvalidInstance("linear objective needs finite c".into()));
                }
            }
            Objective::Quadratic { target, weight } => {
                if target.is_empty() || !finite(target) || !weight.is_finite() {
                    return Err(Error::InvalidInstance("quadratic objective needs finite data".into()));
                }
            }
            Objective::QuadraticForm { hessian, linear } => {
                let d = linear.len();
                if d == 0 || !finite(linear) {
                    return Err(Error::InvalidInstance("quadratic form needs finite c".into()));
                }
                check_dim("hessian rows", d, hessian.len())?;
                for row in hessian {
                    check_dim("hessian columns", d, row.len())?;
                    if !finite(row) {
                        return Err(Error::InvalidInstance("non-finite hessian".into()));
                    }
                }
                for i in 0..d {
                    for j in 0..i {
                        if (hessian[i][j] - hessian[j][i]).abs() > 1e-12 {
                            return Err(Error::InvalidInstance("hessian must be symmetric".into()));
                        }
                    }
                }
            }
            Objective::Sigmoidal(s) => {
                let d = s.amplitude.len();
                if d == 0 {
                    return Err(Error::InvalidInstance("sigmoidal objective needs d >= 1".into()));
                }
                check_dim("sigmoid steepness", d, s.steepness.len())?;
                check_dim("sigmoid threshold", d, s.threshold.len())?;
                if !finite(&s.amplitude) || !finite(&s.steepness) || !finite(&s.threshold) {
                    return Err(Error::InvalidInstance("non-finite sigmoid parameters".into()));
                }
            }
            Objective::BlockSum { blocks } => {
                if blocks.is_empty() {
                    return Err(Error::InvalidInstance("block sum without blocks".into()));
                }
                blocks.iter().try_for_each(Objective::validate)?;
            }
            Objective::Custom(c) => {
                if c.dim() == 0 {
                    return Err(Error::InvalidInstance("custom objective with d = 0".into()));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Objective::Linear { c } => c.len(),
            Objective::Quadratic { target, .. } => target.len(),
            Objective::QuadraticForm { linear, .. } => linear.len(),
            Objective::Sigmoidal(s) => s.amplitude.len(),
            Objective::BlockSum { blocks } => blocks.iter().map(Objective::dim).sum(),
            Objective::Custom(c) => c.dim(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Objective::Linear { c } => dot(c, x),
            Objective::Quadratic { target, weight } => {
                weight
                    * x.iter()
                        .zip(target)
                        .map(|(a, g)| (a - g) * (a - g))
                        .sum::<f64>()
            }
            Objective::QuadraticForm { hessian, linear } => {
                let quad: f64 = hessian
                    .iter()
                    .zip(x)
                    .map(|(row, xi)| xi * dot(row, x))
                    .sum();
                0.5 * quad + dot(linear, x)
            }
            Objective::Sigmoidal(s) => -(0..x.len())
                .map(|j| s.amplitude[j] * logistic(s.steepness[j] * (x[j] - s.threshold[j])))
                .sum::<f64>(),
            Objective::BlockSum { blocks } => {
                let mut offset = 0;
                let mut total = 0.0;
                for b in blocks {
                    let n = b.dim();
                    total += b.value(&x[offset..offset + n]);
                    offset += n;
                }
                total
            }
            Objective::Custom(c) => c.value(x),
        }
    }

    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Objective::Linear { c } => out.copy_from_slice(c),
            Objective::Quadratic { target, weight } => {
                for j in 0..x.len() {
                    out[j] = 2.0 * weight * (x[j] - target[j]);
                }
            }
            Objective::QuadraticForm { hessian, linear } => {
                for (j, row) in hessian.iter().enumerate() {
                    out[j] = dot(row, x) + linear[j];
                }
            }
            Objective::Sigmoidal(s) => {
                for j in 0..x.len() {
                    let sig = logistic(s.steepness[j] * (x[j] - s.threshold[j]));
                    out[j] = -s.amplitude[j] * s.steepness[j] * sig * (1.0 - sig);
                }
            }
            Objective::BlockSum { blocks } => {
                let mut offset = 0;
                for b in blocks {
                    let n = b.dim();
                    b.gradient_into(&x[offset..offset + n], &mut out[offset..offset + n]);
                    offset += n;
                }
            }
            Objective::Custom(c) => c.gradient_into(x, out),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.gradient_into(x, &mut g);
        g
    }

    /// Gradient-Lipschitz constant `L` on all of `R^d`.
    pub fn smoothness(&self) -> f64 {
        match self {
            Objective::Linear { .. } => 0.0,
            Objective::Quadratic { weight, .. } => 2.0 * weight.abs(),
            Objective::QuadraticForm { hessian, .. } => {
                let eig = symmetric_eigenvalues(hessian);
                eig.iter().fold(0.0, |m, e| m.max(e.abs()))
            }
            // |σ''| peaks at a²/(6√3) < a²/4; the looser envelope is kept.
            Objective::Sigmoidal(s) => s
                .amplitude
                .iter()
                .zip(&s.steepness)
                .map(|(c, a)| c.abs() * a * a / 4.0)
                .fold(0.0, f64::max),
            Objective::BlockSum { blocks } => {
                blocks.iter().map(Objective::smoothness).fold(0.0, f64::max)
            }
            Objective::Custom(c) => c.smoothness(),
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Objective::Linear { .. } => true,
            Objective::Quadratic { weight, .. } => *weight >= 0.0,
            Objective::QuadraticForm { hessian, .. } => {
                symmetric_eigenvalues(hessian).iter().all(|e| *e >= -1e-12)
            }
            Objective::Sigmoidal(_) => false,
            Objective::BlockSum { blocks } => blocks.iter().all(Objective::is_convex),
            Objective::Custom(c) => c.is_convex(),
        }
    }

    /// Closed-form `(M, K)` with `M >= sup ||∇f||` and `K >= sup |f|` over the
    /// box `[lower, upper]`.
    pub fn box_bounds(&self, lower: &[f64], upper: &[f64]) -> Option<(f64, f64)> {
        match self {
            Objective::Linear { c } => {
                let hi: f64 = (0..c.len()).map(|j| (c[j] * lower[j]).max(c[j] * upper[j])).sum();
                let lo: f64 = (0..c.len()).map(|j| (c[j] * lower[j]).min(c[j] * upper[j])).sum();
                Some((norm(c), hi.abs().max(lo.abs())))
            }
            Objective::Quadratic { target, weight } => {
                let far: Vec<f64> = (0..target.len())
                    .map(|j| (lower[j] - target[j]).abs().max((upper[j] - target[j]).abs()))
                    .collect();
                let sq: f64 = far.iter().map(|r| r * r).sum();
                Some((2.0 * weight.abs() * sq.sqrt(), weight.abs() * sq))
            }
            Objective::QuadraticForm { hessian, linear } => {
                let d = linear.len();
                if d > 20 {
                    return None;
                }
                // ||Hx + c|| is convex, so its maximum over the box sits at a corner.
                let mut m = 0.0f64;
                let mut corner = vec![0.0; d];
                let mut g = vec![0.0; d];
                for mask in 0..(1u64 << d) {
                    for j in 0..d {
                        corner[j] = if mask >> j & 1 == 1 { upper[j] } else { lower[j] };
                    }
                    self.gradient_into(&corner, &mut g);
                    m = m.max(norm(&g));
                }
                let reach: Vec<f64> = (0..d).map(|j| lower[j].abs().max(upper[j].abs())).collect();
                let mut k: f64 = (0..d).map(|j| linear[j].abs() * reach[j]).sum();
                for i in 0..d {
                    for j in 0..d {
                        k += 0.5 * hessian[i][j].abs() * reach[i] * reach[j];
                    }
                }
                Some((m, k))
            }
            Objective::Sigmoidal(s) => {
                let mut m2 = 0.0;
                let mut k = 0.0;
                for j in 0..s.amplitude.len() {
                    let (c, a, x0) = (s.amplitude[j], s.steepness[j], s.threshold[j]);
                    // σ(1-σ) peaks where the argument is closest to zero.
                    let nearest = x0.clamp(lower[j], upper[j]);
                    let sig = logistic(a * (nearest - x0));
                    let mj = (c * a).abs() * sig * (1.0 - sig);
                    m2 += mj * mj;
                    let at_lo = (c * logistic(a * (lower[j] - x0))).abs();
                    let at_hi = (c * logistic(a * (upper[j] - x0))).abs();
                    k += at_lo.max(at_hi);
                }
                Some((m2.sqrt(), k))
            }
            Objective::BlockSum { blocks } => {
                let mut offset = 0;
                let mut m2 = 0.0;
                let mut k = 0.0;
                for b in blocks {
                    let n = b.dim();
                    let (mb, kb) =
                        b.box_bounds(&lower[offset..offset + n], &upper[offset..offset + n])?;
                    m2 += mb * mb;
                    k += kb;
                    offset += n;
                }
                Some((m2.sqrt(), k))
            }
            Objective::Custom(c) => c.box_bounds(lower, upper),
        }
    }
}

fn symmetric_eigenvalues(h: &[Vec<f64>]) -> Vec<f64> {
    let d = h.len();
    let m = DMatrix::from_fn(d, d, |i, j| 0.5 * (h[i][j] + h[j][i]));
    SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::state::{rng_stream, uniform01, RngStream};

    fn central_difference(f: &Objective, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|j| {
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[j] += h;
                m[j] -= h;
                (f.value(&p) - f.value(&m)) / (2.0 * h)
            })
            .collect()
    }

    fn samples(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = rng_stream(seed, RngStream::Generator);
        (0..n)
            .map(|_| (0..d).map(|_| uniform01(&mut rng)).collect())
            .collect()
    }

    fn all_objectives() -> Vec<Objective> {
        vec![
            Objective::Linear { c: vec![1.0, -2.0, 0.5] },
            Objective::quadratic(vec![0.3, 0.7, 0.1]),
            Objective::QuadraticForm {
                hessian: vec![
                    vec![2.0, 0.5, 0.0],
                    vec![0.5, -1.0, 0.2],
                    vec![0.0, 0.2, 0.4],
                ],
                linear: vec![0.1, 0.0, -0.3],
            },
            Objective::Sigmoidal(SigmoidalUtility::uniform(3)),
            Objective::BlockSum {
                blocks: vec![
                    Objective::quadratic(vec![0.5]),
                    Objective::Sigmoidal(SigmoidalUtility::uniform(2)),
                ],
            },
        ]
    }

    #[test]
    fn gradients_match_finite_differences() {
        for f in all_objectives() {
            f.validate().unwrap();
            for x in samples(10, f.dim(), 11) {
                let g = f.gradient(&x);
                let fd = central_difference(&f, &x, 1e-6);
                for (a, b) in g.iter().zip(&fd) {
                    let scale = a.abs().max(b.abs()).max(1.0);
                    assert!((a - b).abs() / scale < 1e-5, "{f:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn smoothness_constant_is_valid() {
        for f in all_objectives() {
            let l = f.smoothness();
            let xs = samples(60, f.dim(), 5);
            for pair in xs.chunks(2) {
                let (x, y) = (&pair[0], &pair[1]);
                let gx = f.gradient(x);
                let gy = f.gradient(y);
                let lhs = crate::linalg::dist(&gx, &gy);
                let rhs = l * crate::linalg::dist(x, y);
                assert!(lhs <= rhs + 1e-12, "{f:?}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn box_bounds_dominate_samples() {
        let lower = vec![0.0; 3];
        let upper = vec![1.0; 3];
        for f in all_objectives() {
            let (m, k) = f.box_bounds(&lower, &upper).unwrap();
            for x in samples(200, 3, 9) {
                assert!(norm(&f.gradient(&x)) <= m + 1e-12);
                assert!(f.value(&x).abs() <= k + 1e-12);
            }
        }
    }

    #[test]
    fn linear_box_constants() {
        let f = Objective::Linear { c: vec![-1.0, -1.0] };
        let (m, k) = f.box_bounds(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((m - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(k, 2.0);
        assert_eq!(f.smoothness(), 0.0);
    }

    #[test]
    fn squared_norm_box_constants() {
        let f = Objective::quadratic(vec![0.0, 0.0]);
        let (m, k) = f.box_bounds(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((m - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(k, 2.0);
        assert_eq!(f.smoothness(), 2.0);
    }

    #[test]
    fn convexity_flags() {
        let flags: Vec<bool> = all_objectives().iter().map(Objective::is_convex).collect();
        assert_eq!(flags, vec![true, true, false, false, false]);
    }

    #[test]
    fn sigmoid_is_decreasing() {
        let f = Objective::Sigmoidal(SigmoidalUtility::uniform(1));
        assert!(f.gradient(&[0.2])[0] < 0.0);
        assert!(f.value(&[0.9]) < f.value(&[0.1]));
    }
}
