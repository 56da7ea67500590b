use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::lp::{LinearProgram, LpStatus, Relation, Sense, VarBound};
use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::model::LinearConstraints;

/// The achievable-mean set `Σ_s p_s conv(V_s)` with every state's vertex
/// list stored explicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct MixturePolytope {
    dim: usize,
    probabilities: Vec<f64>,
    vertices: Vec<Vec<Vec<f64>>>,
}

/// Optimal mixture from an LP over the polytope.
#[derive(Clone, Debug)]
pub struct MixtureLp {
    pub point: Vec<f64>,
    /// Per-state convex weights over that state's vertex list.
    pub weights: Vec<Vec<f64>>,
    pub value: f64,
    /// Sensitivities of the optimal value to each `b_i` (nonpositive).
    pub constraint_duals: Vec<f64>,
    pub duality_gap: f64,
}

impl MixturePolytope {
    /// Panics on an empty vertex list or inconsistent dimensions; those are
    /// ruled out by `DecisionSet::validate`.
    pub fn new(probabilities: Vec<f64>, vertices: Vec<Vec<Vec<f64>>>) -> Self {
        assert_eq!(probabilities.len(), vertices.len(), "one vertex list per state");
        assert!(vertices.iter().all(|v| !v.is_empty()), "empty vertex list");
        let dim = vertices[0][0].len();
        assert!(
            vertices.iter().flatten().all(|v| v.len() == dim),
            "vertices of mixed dimension"
        );
        Self {
            dim,
            probabilities,
            vertices,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_states(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn vertices(&self, state: usize) -> &[Vec<f64>] {
        &self.vertices[state]
    }

    fn n_vars(&self) -> usize {
        self.vertices.iter().map(Vec::len).sum()
    }

    /// `Σ_s p_s Σ_k w_{s,k} v_{s,k}`.
    pub fn point(&self, weights: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (s, ws) in weights.iter().enumerate() {
            for (k, w) in ws.iter().enumerate() {
                linalg::axpy(self.probabilities[s] * w, &self.vertices[s][k], &mut out);
            }
        }
        out
    }

    /// Mean of the atom picking vertex `choice[s]` in every state.
    pub fn atom(&self, choice: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (s, &k) in choice.iter().enumerate() {
            linalg::axpy(self.probabilities[s], &self.vertices[s][k], &mut out);
        }
        out
    }

    /// Unconstrained linear minimization, decomposed per state. Returns the
    /// chosen vertex index in each state (lowest index on ties).
    pub fn lmo_choice(&self, cost: &[f64]) -> Vec<usize> {
        self.vertices
            .iter()
            .map(|vs| {
                let mut best = 0;
                let mut best_val = linalg::dot(cost, &vs[0]);
                for (k, v) in vs.iter().enumerate().skip(1) {
                    let val = linalg::dot(cost, v);
                    if val < best_val {
                        best = k;
                        best_val = val;
                    }
                }
                best
            })
            .collect()
    }

    pub fn lmo(&self, cost: &[f64]) -> Vec<f64> {
        self.atom(&self.lmo_choice(cost))
    }

    /// Every atom mean; exponential in the number of states.
    pub fn extreme_candidates(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        let mut choice = vec![0usize; self.n_states()];
        loop {
            let p = self.atom(&choice);
            if !out.contains(&p) {
                out.push(p);
            }
            let mut s = 0;
            loop {
                if s == choice.len() {
                    return out;
                }
                choice[s] += 1;
                if choice[s] < self.vertices[s].len() {
                    break;
                }
                choice[s] = 0;
                s += 1;
            }
        }
    }

    /// Random member with independent uniform-Dirichlet weights per state.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let weights: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|vs| {
                let mut w: Vec<f64> = (0..vs.len())
                    .map(|_| -(1.0 - rng.random::<f64>()).ln())
                    .collect();
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= total);
                w
            })
            .collect();
        self.point(&weights)
    }

    fn base_lp(&self, sense: Sense, cost: &[f64]) -> LinearProgram {
        let mut obj = Vec::with_capacity(self.n_vars());
        for (s, vs) in self.vertices.iter().enumerate() {
            for v in vs {
                obj.push(self.probabilities[s] * linalg::dot(cost, v));
            }
        }
        let n = obj.len();
        let mut lp = LinearProgram::new(sense, obj);
        let mut offset = 0;
        for vs in &self.vertices {
            let mut row = vec![0.0; n];
            row[offset..offset + vs.len()].iter_mut().for_each(|a| *a = 1.0);
            lp.constrain(row, Relation::Eq, 1.0);
            offset += vs.len();
        }
        lp
    }

    /// Row of the `λ`-space coefficients of `⟨a, v(λ)⟩`.
    fn mixed_row(&self, a: &[f64]) -> Vec<f64> {
        let mut row = Vec::with_capacity(self.n_vars());
        for (s, vs) in self.vertices.iter().enumerate() {
            for v in vs {
                row.push(self.probabilities[s] * linalg::dot(a, v));
            }
        }
        row
    }

    fn split_weights(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.n_states());
        let mut offset = 0;
        for vs in &self.vertices {
            out.push(x[offset..offset + vs.len()].iter().map(|w| w.max(0.0)).collect());
            offset += vs.len();
        }
        out
    }

    /// Minimizes `⟨cost, v⟩` over members with `Av <= b`. An empty region is
    /// reported as `Error::Infeasible`.
    pub fn constrained_lmo(&self, cost: &[f64], c: &LinearConstraints) -> Result<MixtureLp> {
        check_dim("cost", self.dim, cost.len())?;
        check_dim("constraints", self.dim, c.dim())?;
        let mut lp = self.base_lp(Sense::Minimize, cost);
        for (a, b) in c.rows().iter().zip(c.rhs()) {
            lp.constrain(self.mixed_row(a), Relation::Le, *b);
        }
        let sol = lp.solve()?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(Error::Infeasible),
            LpStatus::Unbounded => unreachable!("bounded feasible region"),
        }
        let weights = self.split_weights(&sol.x);
        let ns = self.n_states();
        Ok(MixtureLp {
            point: self.point(&weights),
            weights,
            value: sol.value,
            constraint_duals: sol.duals[ns..].to_vec(),
            duality_gap: (sol.value - sol.dual_value).abs(),
        })
    }

    /// LP membership test: the smallest L1 residual `‖v(λ) − point‖₁` is at
    /// most `tol`.
    pub fn contains(&self, point: &[f64], tol: f64) -> Result<bool> {
        check_dim("point", self.dim, point.len())?;
        Ok(self.l1_residual(point)? <= tol)
    }

    pub fn l1_residual(&self, point: &[f64]) -> Result<f64> {
        let nv = self.n_vars();
        let n = nv + 2 * self.dim;
        let mut obj = vec![0.0; n];
        obj[nv..].iter_mut().for_each(|c| *c = 1.0);
        let mut lp = LinearProgram::new(Sense::Minimize, obj);
        let mut offset = 0;
        for vs in &self.vertices {
            let mut row = vec![0.0; n];
            row[offset..offset + vs.len()].iter_mut().for_each(|a| *a = 1.0);
            lp.constrain(row, Relation::Eq, 1.0);
            offset += vs.len();
        }
        for j in 0..self.dim {
            let mut e = vec![0.0; self.dim];
            e[j] = 1.0;
            let mut row = self.mixed_row(&e);
            row.resize(n, 0.0);
            row[nv + 2 * j] = 1.0;
            row[nv + 2 * j + 1] = -1.0;
            lp.constrain(row, Relation::Eq, point[j]);
        }
        let sol = lp.solve()?;
        debug_assert_eq!(sol.status, LpStatus::Optimal);
        Ok(sol.value.max(0.0))
    }

    /// Maximizes the uniform constraint margin `ε` over members.
    pub fn max_margin(&self, c: &LinearConstraints) -> Result<(f64, Vec<Vec<f64>>)> {
        check_dim("constraints", self.dim, c.dim())?;
        let nv = self.n_vars();
        let mut lp = self.base_lp(Sense::Maximize, &vec![0.0; self.dim]);
        lp.objective.push(1.0);
        lp.bounds.push(VarBound::FREE);
        for con in &mut lp.constraints {
            con.coeffs.push(0.0);
        }
        for (a, b) in c.rows().iter().zip(c.rhs()) {
            let mut row = self.mixed_row(a);
            row.push(1.0);
            lp.constrain(row, Relation::Le, *b);
        }
        let sol = lp.solve()?;
        match sol.status {
            LpStatus::Optimal => Ok((sol.x[nv], self.split_weights(&sol.x[..nv]))),
            LpStatus::Unbounded => Err(Error::InvalidInstance(
                "slater margin is unbounded without constraints".into(),
            )),
            LpStatus::Infeasible => unreachable!("margin LP is always feasible"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_interval() -> MixturePolytope {
        MixturePolytope::new(vec![1.0], vec![vec![vec![0.0], vec![1.0]]])
    }

    fn two_state() -> MixturePolytope {
        MixturePolytope::new(
            vec![0.5, 0.5],
            vec![
                vec![vec![0.0, 0.0], vec![1.0, 0.0]],
                vec![vec![0.0, 0.0], vec![0.0, 1.0]],
            ],
        )
    }

    #[test]
    fn membership() {
        let p = two_state();
        assert!(p.contains(&[0.5, 0.5], 1e-9).unwrap());
        assert!(p.contains(&[0.25, 0.1], 1e-9).unwrap());
        assert!(!p.contains(&[0.6, 0.0], 1e-9).unwrap());
        assert!((p.l1_residual(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extreme_candidates_cover_square() {
        let pts = two_state().extreme_candidates();
        assert_eq!(pts.len(), 4);
        assert!(pts.contains(&vec![0.5, 0.5]));
    }

    #[test]
    fn constrained_lmo_and_duals() {
        let p = unit_interval();
        let c = LinearConstraints::new(1, vec![vec![1.0]], vec![0.5]).unwrap();
        let sol = p.constrained_lmo(&[-1.0], &c).unwrap();
        assert!((sol.point[0] - 0.5).abs() < 1e-12);
        assert!((sol.value + 0.5).abs() < 1e-12);
        assert!((sol.constraint_duals[0] + 1.0).abs() < 1e-12);
        assert!(sol.duality_gap < 1e-9);
    }

    #[test]
    fn empty_region() {
        let p = unit_interval();
        let c = LinearConstraints::new(1, vec![vec![1.0]], vec![-0.5]).unwrap();
        assert!(matches!(p.constrained_lmo(&[1.0], &c), Err(Error::Infeasible)));
    }

    #[test]
    fn margin() {
        let p = unit_interval();
        let c = LinearConstraints::new(1, vec![vec![1.0]], vec![0.5]).unwrap();
        let (eps, w) = p.max_margin(&c).unwrap();
        assert!((eps - 0.5).abs() < 1e-12);
        assert!(p.point(&w)[0].abs() < 1e-12);
    }
}
