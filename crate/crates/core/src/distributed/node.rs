use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::model::{DecisionSet, Objective};

/// One agent: a local decision set per global state and a local objective
/// over `[γ_i; θ_i]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Node {
    pub decision_sets: Vec<DecisionSet>,
    pub objective: Objective,
}

impl Node {
    pub fn gamma_dim(&self) -> usize {
        self.decision_sets.first().map_or(0, DecisionSet::dim)
    }

    pub(crate) fn validate(&self, n_states: usize, p: usize) -> Result<()> {
        check_dim("node decision sets per state", n_states, self.decision_sets.len())?;
        let d = self.gamma_dim();
        for s in &self.decision_sets {
            s.validate()?;
            check_dim("node decision set", d, s.dim())?;
        }
        self.objective.validate()?;
        check_dim("node objective", d + p, self.objective.dim())
    }
}

/// Everything node `i` may read when choosing `θ_i`: for each neighbor `j`
/// (ascending) the pair `(Q_ij, Q_ji)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeQueues<'a> {
    pub node: usize,
    pub links: Vec<(usize, &'a [f64], &'a [f64])>,
}

/// `x_i = lmo(X_i, V ∇_γ f_i(γ_prev, β_prev))`. `grad` is the full joint
/// gradient at `[γ_prev; β_prev]`; its leading `d_i` entries are used.
pub fn node_step_x(set: &DecisionSet, v: f64, grad: &[f64], x: &mut [f64]) -> Result<()> {
    let d = set.dim();
    if grad.len() < d {
        return Err(Error::DimensionMismatch {
            context: "node gradient",
            expected: d,
            got: grad.len(),
        });
    }
    let cost: Vec<f64> = grad[..d].iter().map(|g| v * g).collect();
    set.lmo_into(&cost, x)
}

/// `θ_i = argmin_Θ V⟨∇_θ f_i, θ⟩ + Σ_j ⟨Q_ij − Q_ji, θ⟩`, solved by the box
/// rule. The queue terms are accumulated in lexicographic order of the
/// ordered pair, which is the row order of the stacked constraint matrix.
pub fn node_step_theta(
    theta_box: &DecisionSet,
    v: f64,
    grad_theta: &[f64],
    queues: &NodeQueues<'_>,
    theta: &mut [f64],
) -> Result<()> {
    let p = theta_box.dim();
    check_dim("theta gradient", p, grad_theta.len())?;
    let mut cost: Vec<f64> = grad_theta.iter().map(|g| v * g).collect();
    let i = queues.node;
    let mut apply = |q: &[f64], sign: f64| {
        for (c, qk) in cost.iter_mut().zip(q) {
            *c += qk * sign;
        }
    };
    // Pairs (j, i) with j < i come before every (i, ·) pair.
    for &(_, _, q_ji) in queues.links.iter().filter(|l| l.0 < i) {
        apply(q_ji, -1.0);
    }
    for &(_, q_ij, _) in &queues.links {
        apply(q_ij, 1.0);
    }
    for &(_, _, q_ji) in queues.links.iter().filter(|l| l.0 > i) {
        apply(q_ji, -1.0);
    }
    theta_box.lmo_into(&cost, theta)
}

/// `Q_ij ← max(Q_ij + θ_i − θ_j, 0)` entrywise.
pub fn edge_queue_update(q: &mut [f64], theta_i: &[f64], theta_j: &[f64]) {
    for ((qk, a), b) in q.iter_mut().zip(theta_i).zip(theta_j) {
        let r = (a - b) - 0.0;
        *qk = (*qk + r).max(0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box(p: usize) -> DecisionSet {
        DecisionSet::boxed(vec![0.0; p], vec![1.0; p]).unwrap()
    }

    #[test]
    fn x_step_examples() {
        let set = DecisionSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let mut x = vec![0.0; 2];
        node_step_x(&set, 1.0, &[1.0, -1.0, 5.0], &mut x).unwrap();
        assert_eq!(x, vec![0.0, 1.0]);
        let fin = DecisionSet::finite(vec![vec![0.3, 0.0], vec![0.0, 0.0]]).unwrap();
        node_step_x(&fin, 1.0, &[0.0, 0.0], &mut x).unwrap();
        assert_eq!(x, vec![0.3, 0.0]);
    }

    #[test]
    fn theta_step_examples() {
        let zero = [0.0];
        let mut th = vec![0.0];
        let q = NodeQueues {
            node: 0,
            links: vec![(1, &zero[..], &zero[..])],
        };
        node_step_theta(&unit_box(1), 1.0, &[1.0], &q, &mut th).unwrap();
        assert_eq!(th, vec![0.0]);

        let (qij, qji) = ([0.0], [2.0]);
        let q = NodeQueues {
            node: 0,
            links: vec![(1, &qij[..], &qji[..])],
        };
        node_step_theta(&unit_box(1), 0.0, &[1.0], &q, &mut th).unwrap();
        assert_eq!(th, vec![1.0]);

        let same = [3.0];
        let q = NodeQueues {
            node: 1,
            links: vec![(0, &same[..], &same[..]), (2, &same[..], &same[..])],
        };
        node_step_theta(&unit_box(1), 1.0, &[-0.5], &q, &mut th).unwrap();
        assert_eq!(th, vec![1.0]);
        node_step_theta(&unit_box(1), 1.0, &[0.5], &q, &mut th).unwrap();
        assert_eq!(th, vec![0.0]);
    }

    #[test]
    fn edge_update_examples() {
        let mut q = vec![0.0];
        edge_queue_update(&mut q, &[0.4], &[0.4]);
        assert_eq!(q, vec![0.0]);
        let mut q = vec![1.0];
        edge_queue_update(&mut q, &[0.0], &[2.0]);
        assert_eq!(q, vec![0.0]);
        let mut q = vec![0.0];
        edge_queue_update(&mut q, &[0.5], &[0.2]);
        assert!((q[0] - 0.3).abs() < 1e-15);
    }
}
