use crate::linalg::norm;
use crate::model::LinearConstraints;

/// Virtual queues `Q(t)`, one per linear constraint, entrywise nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct QueueState(Vec<f64>);

impl QueueState {
    pub fn zeros(n: usize) -> Self {
        QueueState(vec![0.0; n])
    }

    /// Clamps nothing: callers must pass nonnegative entries.
    pub fn from_vec(q: Vec<f64>) -> Self {
        debug_assert!(q.iter().all(|x| *x >= 0.0), "negative queue entry");
        QueueState(q)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    /// In-place `Q_i <- max(Q_i + <a_i, x> - b_i, 0)`.
    pub fn advance(&mut self, x: &[f64], c: &LinearConstraints) {
        for ((q, a), b) in self.0.iter_mut().zip(c.rows()).zip(c.rhs()) {
            let r = crate::linalg::dot(a, x) - b;
            *q = (*q + r).max(0.0);
        }
    }
}

pub fn queue_update(q: &QueueState, x: &[f64], c: &LinearConstraints) -> QueueState {
    let mut next = q.clone();
    next.advance(x, c);
    next
}
