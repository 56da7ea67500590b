use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;

/// The set of decisions available in one state.
///
/// Tie-breaking in [`DecisionSet::lmo_into`] is fixed so that runs are
/// reproducible: lowest vertex index for finite sets, the lower corner on a
/// zero cost coordinate for boxes, the first minimal coordinate for simplices,
/// and blockwise for products.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecisionSet {
    FiniteVertices { vertices: Vec<Vec<f64>> },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `conv{scale * e_j}`.
    Simplex { dim: usize, scale: f64 },
    /// Cartesian product of blocks laid out contiguously.
    Product { blocks: Vec<DecisionSet> },
}

impl DecisionSet {
    /// Finite set with exact duplicates removed (first occurrence kept).
    pub fn finite(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let mut unique: Vec<Vec<f64>> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !unique.contains(&v) {
                unique.push(v);
            }
        }
        let set = DecisionSet::FiniteVertices { vertices: unique };
        set.validate()?;
        Ok(set)
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let set = DecisionSet::Box { lower, upper };
        set.validate()?;
        Ok(set)
    }

    pub fn simplex(dim: usize, scale: f64) -> Result<Self> {
        let set = DecisionSet::Simplex { dim, scale };
        set.validate()?;
        Ok(set)
    }

    pub fn product(blocks: Vec<DecisionSet>) -> Result<Self> {
        let set = DecisionSet::Product { blocks };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DecisionSet::FiniteVertices { vertices } => {
                let Some(first) = vertices.first() else {
                    return Err(Error::InvalidInstance("empty vertex list".into()));
                };
                let d = first.len();
                if d == 0 {
                    return Err(Error::InvalidInstance("zero-dimensional vertex".into()));
                }
                for (i, v) in vertices.iter().enumerate() {
                    check_dim("decision vertex", d, v.len())?;
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidInstance("non-finite vertex".into()));
                    }
                    if vertices[..i].contains(v) {
                        return Err(Error::InvalidInstance(format!(
                            "duplicate vertex {v:?} in finite decision set"
                        )));
                    }
                }
                Ok(())
            }
            DecisionSet::Box { lower, upper } => {
                check_dim("box bounds", lower.len(), upper.len())?;
                if lower.is_empty() {
                    return Err(Error::InvalidInstance("zero-dimensional box".into()));
                }
                let ok = lower
                    .iter()
                    .zip(upper)
                    .all(|(l, u)| l.is_finite() && u.is_finite() && l <= u);
                if ok {
                    Ok(())
                } else {
                    Err(Error::InvalidInstance(
                        "box bounds must be finite with lower <= upper".into(),
                    ))
                }
            }
            DecisionSet::Simplex { dim, scale } => {
                if *dim == 0 || !scale.is_finite() || *scale <= 0.0 {
                    Err(Error::InvalidInstance(
                        "simplex needs dim >= 1 and a positive finite scale".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            DecisionSet::Product { blocks } => {
                if blocks.is_empty() {
                    return Err(Error::InvalidInstance("product of no blocks".into()));
                }
                blocks.iter().try_for_each(DecisionSet::validate)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DecisionSet::FiniteVertices { vertices } => vertices.first().map_or(0, Vec::len),
            DecisionSet::Box { lower, .. } => lower.len(),
            DecisionSet::Simplex { dim, .. } => *dim,
            DecisionSet::Product { blocks } => blocks.iter().map(DecisionSet::dim).sum(),
        }
    }

    /// Writes a minimizer of `<cost, x>` over the set into `out`.
    pub fn lmo_into(&self, cost: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.dim();
        check_dim("lmo cost", d, cost.len())?;
        check_dim("lmo output", d, out.len())?;
        debug_assert!(cost.iter().all(|c| c.is_finite()), "non-finite lmo cost");
        self.lmo_unchecked(cost, out);
        Ok(())
    }

    fn lmo_unchecked(&self, cost: &[f64], out: &mut [f64]) {
        match self {
            DecisionSet::FiniteVertices { vertices } => {
                let k = argmin_vertex(vertices, cost);
                out.copy_from_slice(&vertices[k]);
            }
            DecisionSet::Box { lower, upper } => {
                for j in 0..cost.len() {
                    out[j] = if cost[j] < 0.0 { upper[j] } else { lower[j] };
                }
            }
            DecisionSet::Simplex { scale, .. } => {
                let mut best = 0;
                for j in 1..cost.len() {
                    if cost[j] < cost[best] {
                        best = j;
                    }
                }
                out.fill(0.0);
                out[best] = *scale;
            }
            DecisionSet::Product { blocks } => {
                let mut offset = 0;
                for b in blocks {
                    let n = b.dim();
                    b.lmo_unchecked(&cost[offset..offset + n], &mut out[offset..offset + n]);
                    offset += n;
                }
            }
        }
    }

    pub fn lmo(&self, cost: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.lmo_into(cost, &mut out)?;
        Ok(out)
    }

    /// Extreme points generating the set's convex hull. Box corners are
    /// enumerated with coordinate 0 most significant and the lower bound
    /// first; products enumerate lexicographically with block 0 most
    /// significant.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        match self {
            DecisionSet::FiniteVertices { vertices } => vertices.clone(),
            DecisionSet::Box { lower, upper } => {
                let options: Vec<Vec<Vec<f64>>> = lower
                    .iter()
                    .zip(upper)
                    .map(|(&l, &u)| {
                        if l == u {
                            vec![vec![l]]
                        } else {
                            vec![vec![l], vec![u]]
                        }
                    })
                    .collect();
                cartesian(&options)
            }
            DecisionSet::Simplex { dim, scale } => (0..*dim)
                .map(|j| {
                    let mut v = vec![0.0; *dim];
                    v[j] = *scale;
                    v
                })
                .collect(),
            DecisionSet::Product { blocks } => {
                let options: Vec<Vec<Vec<f64>>> = blocks.iter().map(|b| b.vertices()).collect();
                cartesian(&options)
            }
        }
    }

    /// The members of a finite decision set (finite vertex lists and products
    /// of them); `None` for continuous sets.
    pub fn finite_members(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            DecisionSet::FiniteVertices { vertices } => Some(vertices.clone()),
            DecisionSet::Product { blocks } => {
                let options = blocks
                    .iter()
                    .map(DecisionSet::finite_members)
                    .collect::<Option<Vec<_>>>()?;
                Some(cartesian(&options))
            }
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.finite_members().is_some()
    }
}

/// Free-function form of [`DecisionSet::lmo`].
pub fn lmo(set: &DecisionSet, cost: &[f64]) -> Result<Vec<f64>> {
    set.lmo(cost)
}

pub(crate) fn argmin_vertex(vertices: &[Vec<f64>], cost: &[f64]) -> usize {
    let mut best = 0;
    let mut best_val = dot(&vertices[0], cost);
    for (k, v) in vertices.iter().enumerate().skip(1) {
        let val = dot(v, cost);
        if val < best_val {
            best = k;
            best_val = val;
        }
    }
    best
}

fn cartesian(options: &[Vec<Vec<f64>>]) -> Vec<Vec<f64>> {
    let mut acc: Vec<Vec<f64>> = vec![Vec::new()];
    for block in options {
        let mut next = Vec::with_capacity(acc.len() * block.len());
        for prefix in &acc {
            for piece in block {
                let mut v = prefix.clone();
                v.extend_from_slice(piece);
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_picks_minimum() {
        let s = DecisionSet::finite(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap();
        assert_eq!(s.lmo(&[1.0, 2.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn finite_tie_takes_lowest_index() {
        let s = DecisionSet::finite(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(s.lmo(&[0.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn box_sign_rule() {
        let s = DecisionSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(s.lmo(&[1.0, -1.0]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(s.lmo(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn simplex_first_minimal_coordinate() {
        let s = DecisionSet::simplex(3, 2.0).unwrap();
        assert_eq!(s.lmo(&[1.0, -1.0, -1.0]).unwrap(), vec![0.0, 2.0, 0.0]);
        assert_eq!(s.lmo(&[3.0, 2.0, 1.0]).unwrap(), vec![0.0, 0.0, 2.0]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = DecisionSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            s.lmo(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn finite_sets_are_deduplicated() {
        let s = DecisionSet::finite(vec![vec![1.0], vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(s.vertices(), vec![vec![1.0], vec![0.0]]);
        let raw = DecisionSet::FiniteVertices {
            vertices: vec![vec![1.0], vec![1.0]],
        };
        assert!(raw.validate().is_err());
        assert!(DecisionSet::finite(vec![]).is_err());
    }

    #[test]
    fn box_corner_order() {
        let s = DecisionSet::boxed(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(
            s.vertices(),
            vec![vec![0.0, 0.0], vec![0.0, 2.0], vec![1.0, 0.0], vec![1.0, 2.0]]
        );
    }

    #[test]
    fn product_is_blockwise() {
        let a = DecisionSet::finite(vec![vec![0.0], vec![1.0]]).unwrap();
        let b = DecisionSet::boxed(vec![-1.0], vec![1.0]).unwrap();
        let p = DecisionSet::product(vec![a, b]).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.lmo(&[-1.0, 0.0]).unwrap(), vec![1.0, -1.0]);
        assert_eq!(p.vertices().len(), 4);
        assert!(p.finite_members().is_none());
    }

    #[test]
    fn product_of_finite_sets_is_finite() {
        let a = DecisionSet::finite(vec![vec![0.0], vec![1.0]]).unwrap();
        let p = DecisionSet::product(vec![a.clone(), a]).unwrap();
        assert_eq!(
            p.finite_members().unwrap(),
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]
        );
    }
}
