//! Active-set Frank-Wolfe used by the oracles. Pairwise steps move weight
//! from the worst active atom to the oracle atom, which converges linearly on
//! polytopes where the plain method would crawl along a face.

use crate::linalg;

pub(crate) struct FwOutcome {
    pub point: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) struct ActiveSetFw<'a> {
    /// Stops once the FW gap is at or below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Largest admissible step along `d` given the current point and the
    /// gradient there.
    pub step: &'a dyn Fn(&[f64], &[f64], &[f64]) -> f64,
}

/// Exact line search for an isotropic quadratic with Hessian `h·I`.
pub(crate) fn quadratic_step(h: f64) -> impl Fn(&[f64], &[f64], &[f64]) -> f64 {
    move |_x, g, d| {
        let dd = linalg::dot(d, d);
        if dd == 0.0 {
            return 0.0;
        }
        let gd = linalg::dot(g, d);
        if h <= 0.0 {
            return if gd < 0.0 { f64::INFINITY } else { 0.0 };
        }
        (-gd / (h * dd)).max(0.0)
    }
}

impl ActiveSetFw<'_> {
    /// Minimizes from `start` (which must be an atom). `lmo` returns an atom
    /// minimizing the linear cost; atoms are matched by exact equality.
    pub fn run<G, L>(&self, start: Vec<f64>, grad: G, mut lmo: L) -> crate::Result<FwOutcome>
    where
        G: Fn(&[f64], &mut [f64]),
        L: FnMut(&[f64]) -> crate::Result<Vec<f64>>,
    {
        let dim = start.len();
        let mut atoms: Vec<Vec<f64>> = vec![start.clone()];
        let mut weights: Vec<f64> = vec![1.0];
        let mut x = start;
        let mut g = vec![0.0; dim];
        let mut gap = f64::INFINITY;
        for it in 0..self.max_iter {
            grad(&x, &mut g);
            let s = lmo(&g)?;
            gap = linalg::dot(&g, &x) - linalg::dot(&g, &s);
            if gap <= self.tol {
                return Ok(FwOutcome {
                    point: x,
                    gap,
                    iterations: it,
                    converged: true,
                });
            }
            let (away, _) = atoms
                .iter()
                .enumerate()
                .map(|(i, a)| (i, linalg::dot(&g, a)))
                .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
            let d = linalg::sub(&s, &atoms[away]);
            let max_step = weights[away];
            let step = (self.step)(&x, &g, &d).min(max_step);
            if step <= 0.0 || !step.is_finite() {
                // No progress along the pairwise direction; fall back to a
                // plain FW step toward s.
                let d = linalg::sub(&s, &x);
                let step = (self.step)(&x, &g, &d).min(1.0);
                if step <= 0.0 {
                    return Ok(FwOutcome {
                        point: x,
                        gap,
                        iterations: it,
                        converged: false,
                    });
                }
                weights.iter_mut().for_each(|w| *w *= 1.0 - step);
                self.add_atom(&mut atoms, &mut weights, s, step);
                linalg::axpy(step, &d, &mut x);
                continue;
            }
            let s_moved = step;
            weights[away] -= s_moved;
            self.add_atom(&mut atoms, &mut weights, s, s_moved);
            if step >= max_step {
                weights[away] = 0.0;
            }
            // Drop exhausted atoms and rebuild x from the weights so the
            // iterate never drifts off the hull through rounding.
            let mut i = 0;
            while i < atoms.len() {
                if weights[i] <= 0.0 {
                    atoms.swap_remove(i);
                    weights.swap_remove(i);
                } else {
                    i += 1;
                }
            }
            let total: f64 = weights.iter().sum();
            x = vec![0.0; dim];
            for (a, w) in atoms.iter().zip(&weights) {
                linalg::axpy(w / total, a, &mut x);
            }
        }
        Ok(FwOutcome {
            point: x,
            gap,
            iterations: self.max_iter,
            converged: false,
        })
    }

    fn add_atom(&self, atoms: &mut Vec<Vec<f64>>, weights: &mut Vec<f64>, s: Vec<f64>, w: f64) {
        match atoms.iter().position(|a| *a == s) {
            Some(i) => weights[i] += w,
            None => {
                atoms.push(s);
                weights.push(w);
            }
        }
    }
}
