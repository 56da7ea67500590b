//! Exhaustive oracles for instances with finite decision sets in one or two
//! dimensions. They share no code with the LP and Frank-Wolfe oracles.

use pdfw_core::model::ProblemInstance;

const EPS: f64 = 1e-12;

/// The achievable-mean polytope as the hull of all atoms `Σ_s p_s v_s`.
#[derive(Clone, Debug)]
pub struct BruteHull {
    dim: usize,
    atoms: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn seg_dist2(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let ap: Vec<f64> = a.iter().zip(p).map(|(x, y)| y - x).collect();
    let len2 = dot(&ab, &ab);
    let s = if len2 <= EPS { 0.0 } else { (dot(&ap, &ab) / len2).clamp(0.0, 1.0) };
    ap.iter().zip(&ab).map(|(u, v)| (u - s * v).powi(2)).sum()
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl BruteHull {
    /// `None` unless every set is finite and `d <= 2`.
    pub fn new(inst: &ProblemInstance) -> Option<Self> {
        let dim = inst.dim();
        if dim == 0 || dim > 2 {
            return None;
        }
        let probs = inst.state_model().probabilities();
        let mut atoms = vec![vec![0.0; dim]];
        for (s, set) in inst.decision_sets().iter().enumerate() {
            let members = set.finite_members()?;
            let mut next = Vec::with_capacity(atoms.len() * members.len());
            for a in &atoms {
                for m in &members {
                    next.push(a.iter().zip(m).map(|(x, y)| x + probs[s] * y).collect());
                }
            }
            atoms = next;
        }
        Some(Self { dim, atoms })
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    fn inside_triangle(&self, p: &[f64]) -> bool {
        let a = &self.atoms;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                for k in j + 1..a.len() {
                    let area = cross(&a[i], &a[j], &a[k]);
                    if area.abs() <= EPS {
                        continue;
                    }
                    let w0 = cross(&a[j], &a[k], p) / area;
                    let w1 = cross(&a[k], &a[i], p) / area;
                    let w2 = cross(&a[i], &a[j], p) / area;
                    if w0 >= 0.0 && w1 >= 0.0 && w2 >= 0.0 {
                        return true;
                    }
                }
            }
        }
        false
    }

    pub fn dist(&self, p: &[f64]) -> f64 {
        if self.dim == 1 {
            let lo = self.atoms.iter().map(|a| a[0]).fold(f64::INFINITY, f64::min);
            let hi = self.atoms.iter().map(|a| a[0]).fold(f64::NEG_INFINITY, f64::max);
            return (lo - p[0]).max(p[0] - hi).max(0.0);
        }
        if self.inside_triangle(p) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for i in 0..self.atoms.len() {
            for j in i..self.atoms.len() {
                best = best.min(seg_dist2(p, &self.atoms[i], &self.atoms[j]));
            }
        }
        best.sqrt()
    }

    /// `min ⟨g, v⟩` over the hull intersected with `{Av <= b}`, by checking
    /// every atom, every atom-segment/constraint-line crossing and every
    /// constraint-line crossing. `None` when the region is empty.
    pub fn constrained_min(&self, g: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> Option<f64> {
        let mut cands: Vec<Vec<f64>> = self.atoms.clone();
        for i in 0..self.atoms.len() {
            for j in i + 1..self.atoms.len() {
                let (a, b) = (&self.atoms[i], &self.atoms[j]);
                let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
                for (row, r) in rows.iter().zip(rhs) {
                    let den = dot(row, &ab);
                    if den.abs() <= EPS {
                        continue;
                    }
                    let s = (r - dot(row, a)) / den;
                    if (0.0..=1.0).contains(&s) {
                        cands.push(a.iter().zip(&ab).map(|(x, v)| x + s * v).collect());
                    }
                }
            }
        }
        if self.dim == 1 {
            for (row, r) in rows.iter().zip(rhs) {
                if row[0].abs() > EPS {
                    cands.push(vec![r / row[0]]);
                }
            }
        } else {
            for k in 0..rows.len() {
                for l in k + 1..rows.len() {
                    let (p, q) = (&rows[k], &rows[l]);
                    let det = p[0] * q[1] - p[1] * q[0];
                    if det.abs() <= EPS {
                        continue;
                    }
                    let x = (rhs[k] * q[1] - p[1] * rhs[l]) / det;
                    let y = (p[0] * rhs[l] - rhs[k] * q[0]) / det;
                    cands.push(vec![x, y]);
                }
            }
        }
        cands
            .iter()
            .filter(|v| rows.iter().zip(rhs).all(|(row, r)| dot(row, v) <= r + 1e-9))
            .filter(|v| self.dist(v) <= 1e-9)
            .map(|v| dot(g, v))
            .reduce(f64::min)
    }

    /// FW gap `⟨∇f(γ), γ⟩ − min ⟨∇f(γ), v⟩` over the feasible hull.
    pub fn fw_gap(&self, inst: &ProblemInstance, gamma: &[f64]) -> Option<f64> {
        let g = inst.objective().gradient(gamma);
        let c = inst.constraints();
        let m = self.constrained_min(&g, c.rows(), c.rhs())?;
        Some(dot(&g, gamma) - m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pdfw_core::model::{LinearConstraints, Objective};
    use pdfw_core::problems::make_deterministic;

    #[test]
    fn unit_square() {
        let inst = make_deterministic(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            Objective::quadratic(vec![0.0, 0.0]),
            LinearConstraints::new(2, vec![vec![1.0, 1.0]], vec![1.5]).unwrap(),
        )
        .unwrap();
        let h = BruteHull::new(&inst).unwrap();
        assert_eq!(h.dist(&[0.5, 0.5]), 0.0);
        assert!((h.dist(&[2.0, 0.5]) - 1.0).abs() < 1e-12);
        assert!((h.dist(&[2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-12);
        // min -x - y over the square cut by x + y <= 1.5
        let m = h.constrained_min(&[-1.0, -1.0], inst.constraints().rows(), inst.constraints().rhs());
        assert!((m.unwrap() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn interval() {
        let inst = make_deterministic(
            vec![vec![0.0], vec![1.0]],
            Objective::quadratic(vec![0.3]),
            LinearConstraints::new(1, vec![vec![1.0]], vec![0.5]).unwrap(),
        )
        .unwrap();
        let h = BruteHull::new(&inst).unwrap();
        assert!((h.fw_gap(&inst, &[1.0]).unwrap() - 1.4).abs() < 1e-12);
        assert!((h.dist(&[-0.25]) - 0.25).abs() < 1e-12);
    }
}
