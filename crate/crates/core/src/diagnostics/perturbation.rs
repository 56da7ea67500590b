use serde::{Deserialize, Serialize};

use crate::diagnostics::bounds::{theorems, BoundConstants};
use crate::diagnostics::oracles::fw_gap;
use crate::diagnostics::polytope::MixturePolytope;
use crate::error::Result;
use crate::linalg;
use crate::model::ProblemInstance;

pub const PROPERTY_SLACK: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub pairs: usize,
    /// Largest `|G(γ) − G(γ̃)| − (2DL + M)‖γ − γ̃‖`.
    pub max_excess: f64,
    /// First pair that broke the bound.
    pub offending: Option<(Vec<f64>, Vec<f64>)>,
}

impl PerturbationReport {
    pub fn passed(&self) -> bool {
        self.offending.is_none()
    }
}

pub fn gap_perturbation_check(
    inst: &ProblemInstance,
    poly: &MixturePolytope,
    bc: &BoundConstants,
    pairs: &[(Vec<f64>, Vec<f64>)],
) -> Result<PerturbationReport> {
    let lip = theorems::gap_lipschitz(bc);
    let mut max_excess = f64::NEG_INFINITY;
    let mut offending = None;
    for (a, b) in pairs {
        let diff = (fw_gap(inst, poly, a)? - fw_gap(inst, poly, b)?).abs();
        let excess = diff - lip * linalg::dist(a, b);
        max_excess = max_excess.max(excess);
        if excess > PROPERTY_SLACK && offending.is_none() {
            offending = Some((a.clone(), b.clone()));
        }
    }
    Ok(PerturbationReport {
        pairs: pairs.len(),
        max_excess,
        offending,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::compute_bounds;
    use crate::model::{LinearConstraints, Objective};
    use crate::problems::make_deterministic;

    #[test]
    fn linear_objective_saturates() {
        let inst = make_deterministic(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            Objective::Linear { c: vec![1.0, -2.0] },
            LinearConstraints::none(2),
        )
        .unwrap();
        let poly = inst.mixture_polytope();
        let bc = compute_bounds(&inst);
        let g = [0.2, 0.2];
        let r = gap_perturbation_check(&inst, &poly, &bc, &[(g.to_vec(), g.to_vec())]).unwrap();
        assert!(r.passed());
        assert!(r.max_excess.abs() < 1e-15);
        let pair = (vec![0.1, 0.2], vec![0.3, 0.1]);
        let r = gap_perturbation_check(&inst, &poly, &bc, &[pair]).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn detects_understated_constants() {
        let inst = make_deterministic(
            vec![vec![0.0], vec![1.0]],
            Objective::Linear { c: vec![1.0] },
            LinearConstraints::none(1),
        )
        .unwrap();
        let poly = inst.mixture_polytope();
        let mut bc = compute_bounds(&inst);
        bc.m = 0.5;
        let r = gap_perturbation_check(&inst, &poly, &bc, &[(vec![0.0], vec![1.0])]).unwrap();
        assert!(!r.passed());
    }
}
