use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm};

/// `Aγ <= b` with `N` rows over `R^d`. `N = 0` is allowed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraints {
    dim: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl LinearConstraints {
    pub fn new(dim: usize, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        check_dim("constraint rhs", rows.len(), rhs.len())?;
        for r in &rows {
            check_dim("constraint row", dim, r.len())?;
        }
        let finite = rows.iter().flatten().chain(&rhs).all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidInstance("non-finite constraint data".into()));
        }
        Ok(Self { dim, rows, rhs })
    }

    pub fn none(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        norm(&self.rows[i])
    }

    /// `out_i = <a_i, x> - b_i`
    pub fn residuals_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, a), b) in out.iter_mut().zip(&self.rows).zip(&self.rhs) {
            *o = dot(a, x) - b;
        }
    }

    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.len()];
        self.residuals_into(x, &mut r);
        r
    }

    /// `out += Aᵀq`, accumulated row by row in constraint order.
    pub fn add_transpose_mul(&self, q: &[f64], out: &mut [f64]) {
        for (a, qi) in self.rows.iter().zip(q) {
            for (o, aij) in out.iter_mut().zip(a) {
                *o += qi * aij;
            }
        }
    }

    pub fn transpose_mul(&self, q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.add_transpose_mul(q, &mut out);
        out
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.residuals(x).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}
