use serde::{Deserialize, Serialize};

use crate::diagnostics::fw::{quadratic_step, ActiveSetFw};
use crate::diagnostics::polytope::MixturePolytope;
use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::model::{rng_stream, ProblemInstance, RngStream};

/// Inner FW gap at which `dist_to_polytope` stops. Tighter than the
/// customary 1e-8: the squared distance error is bounded by twice the gap,
/// so 1e-8 would only resolve distances to about 1.4e-4.
pub const DIST_GAP_TOL: f64 = 1e-14;
/// Inner FW gap at which `solve_gamma_star` stops.
pub const OPT_GAP_TOL: f64 = 1e-7;
const MAX_ITER: usize = 200_000;

/// `sup { ⟨∇f(γ), γ − v⟩ : v ∈ Γ̄*, Av <= b }`.
pub fn fw_gap(inst: &ProblemInstance, poly: &MixturePolytope, gamma: &[f64]) -> Result<f64> {
    check_dim("gamma", inst.dim(), gamma.len())?;
    let g = inst.objective().gradient(gamma);
    let sol = poly.constrained_lmo(&g, inst.constraints())?;
    Ok(linalg::dot(&g, gamma) - sol.value)
}

/// Euclidean projection of `gamma` onto the polytope.
#[derive(Clone, Debug)]
pub struct Projection {
    pub point: Vec<f64>,
    pub distance: f64,
    pub inner_gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn project(poly: &MixturePolytope, gamma: &[f64]) -> Result<Projection> {
    check_dim("gamma", poly.dim(), gamma.len())?;
    let step = quadratic_step(1.0);
    let engine = ActiveSetFw {
        tol: DIST_GAP_TOL * linalg::dot(gamma, gamma).max(1.0),
        max_iter: MAX_ITER,
        step: &step,
    };
    let start = poly.lmo(&linalg::scale(gamma, -1.0));
    let out = engine.run(
        start,
        |v, g| {
            for j in 0..v.len() {
                g[j] = v[j] - gamma[j];
            }
        },
        |c| Ok(poly.lmo(c)),
    )?;
    Ok(Projection {
        distance: linalg::dist(&out.point, gamma),
        point: out.point,
        inner_gap: out.gap,
        iterations: out.iterations,
        converged: out.converged,
    })
}

pub fn dist_to_polytope(poly: &MixturePolytope, gamma: &[f64]) -> Result<f64> {
    Ok(project(poly, gamma)?.distance)
}

/// Reference optimum of a convex instance.
#[derive(Clone, Debug)]
pub struct GammaStar {
    pub point: Vec<f64>,
    pub value: f64,
    /// FW gap at `point`; an upper bound on `value − f*`.
    pub gap: f64,
}

pub fn solve_gamma_star(inst: &ProblemInstance, poly: &MixturePolytope) -> Result<GammaStar> {
    let obj = inst.objective();
    if !obj.is_convex() {
        return Err(Error::NonConvex);
    }
    let c = inst.constraints();
    let l = obj.smoothness();
    let step = move |_x: &[f64], g: &[f64], d: &[f64]| {
        let dd = linalg::dot(d, d);
        let gd = linalg::dot(g, d);
        if dd == 0.0 || gd >= 0.0 {
            0.0
        } else if l <= 0.0 {
            f64::INFINITY
        } else {
            -gd / (l * dd)
        }
    };
    let engine = ActiveSetFw {
        tol: OPT_GAP_TOL,
        max_iter: MAX_ITER,
        step: &step,
    };
    let start = poly.constrained_lmo(&vec![0.0; inst.dim()], c)?.point;
    let out = engine.run(
        start,
        |x, g| obj.gradient_into(x, g),
        |cost| Ok(poly.constrained_lmo(cost, c)?.point),
    )?;
    let gap = fw_gap(inst, poly, &out.point)?;
    Ok(GammaStar {
        value: obj.value(&out.point),
        point: out.point,
        gap,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlaterCertificate {
    pub margin: f64,
    /// Convex weights over each state's vertex list.
    pub witness: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
}

pub const SLATER_MIN_MARGIN: f64 = 1e-9;

/// `None` when the best uniform margin is not above `SLATER_MIN_MARGIN`.
pub fn certify_slater(
    inst: &ProblemInstance,
    poly: &MixturePolytope,
) -> Result<Option<SlaterCertificate>> {
    if inst.constraints().is_empty() {
        return Err(Error::InvalidInstance(
            "slater certification needs at least one constraint".into(),
        ));
    }
    let (margin, witness) = poly.max_margin(inst.constraints())?;
    if margin <= SLATER_MIN_MARGIN {
        return Ok(None);
    }
    Ok(Some(SlaterCertificate {
        margin,
        mean: poly.point(&witness),
        witness,
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagrangeCertificate {
    pub lambda: Vec<f64>,
    /// Largest `f(γ*) − f(γ) − ⟨λ, Aγ − b⟩` over the checked members.
    pub checked_gap: f64,
}

/// Multipliers read off the LP duals at `γ*`, audited on every atom (when
/// there are at most `max_atoms`) plus `samples` random members.
pub fn lagrange_certificate(
    inst: &ProblemInstance,
    poly: &MixturePolytope,
    gamma_star: &[f64],
    samples: usize,
    seed: u64,
) -> Result<LagrangeCertificate> {
    let obj = inst.objective();
    let c = inst.constraints();
    let g = obj.gradient(gamma_star);
    let sol = poly.constrained_lmo(&g, c)?;
    let lambda: Vec<f64> = sol.constraint_duals.iter().map(|y| (-y).max(0.0)).collect();
    let f_star = obj.value(gamma_star);
    let lagrangian_gap = |x: &[f64]| {
        let pen: f64 = c
            .residuals(x)
            .iter()
            .zip(&lambda)
            .map(|(r, l)| r * l)
            .sum();
        f_star - obj.value(x) - pen
    };
    let mut checked_gap = lagrangian_gap(gamma_star);
    let max_atoms = 4096usize;
    let n_atoms = (0..poly.n_states())
        .map(|s| poly.vertices(s).len())
        .try_fold(1usize, |acc, k| acc.checked_mul(k))
        .unwrap_or(usize::MAX);
    if n_atoms <= max_atoms {
        for p in poly.extreme_candidates() {
            checked_gap = checked_gap.max(lagrangian_gap(&p));
        }
    }
    let mut rng = rng_stream(seed, RngStream::Generator);
    for _ in 0..samples {
        checked_gap = checked_gap.max(lagrangian_gap(&poly.sample(&mut rng)));
    }
    Ok(LagrangeCertificate {
        lambda,
        checked_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LinearConstraints, Objective};
    use crate::problems::make_deterministic;

    fn interval(obj: Objective, c: LinearConstraints) -> ProblemInstance {
        make_deterministic(vec![vec![0.0], vec![1.0]], obj, c).unwrap()
    }

    #[test]
    fn gap_examples() {
        let inst = interval(Objective::quadratic(vec![0.0]), LinearConstraints::none(1));
        let poly = inst.mixture_polytope();
        assert!((fw_gap(&inst, &poly, &[1.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(fw_gap(&inst, &poly, &[0.0]).unwrap().abs() < 1e-12);

        let c = LinearConstraints::new(1, vec![vec![1.0]], vec![0.5]).unwrap();
        let inst = interval(Objective::quadratic(vec![0.3]), c);
        let poly = inst.mixture_polytope();
        assert!((fw_gap(&inst, &poly, &[1.0]).unwrap() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn gap_on_empty_region() {
        let c = LinearConstraints::new(1, vec![vec![-1.0]], vec![-2.0]).unwrap();
        let inst = interval(Objective::quadratic(vec![0.0]), c);
        let poly = inst.mixture_polytope();
        assert!(matches!(fw_gap(&inst, &poly, &[0.5]), Err(Error::Infeasible)));
    }

    #[test]
    fn distance_examples() {
        let seg = MixturePolytope::new(vec![1.0], vec![vec![vec![0.0, 0.0], vec![1.0, 0.0]]]);
        assert!((dist_to_polytope(&seg, &[0.5, 1.0]).unwrap() - 1.0).abs() < 1e-9);
        assert!(dist_to_polytope(&seg, &[0.3, 0.0]).unwrap() < 1e-6);

        let mix = MixturePolytope::new(
            vec![0.5, 0.5],
            vec![
                vec![vec![0.0, 0.0], vec![1.0, 0.0]],
                vec![vec![0.0, 0.0], vec![0.0, 1.0]],
            ],
        );
        let d = dist_to_polytope(&mix, &[1.0, 1.0]).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-9, "{d}");
        assert!(dist_to_polytope(&mix, &[0.2, 0.45]).unwrap() < 1e-6);
    }

    #[test]
    fn interior_projection_is_tight() {
        let tri = MixturePolytope::new(
            vec![1.0],
            vec![vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]],
        );
        let p = project(&tri, &[0.2, 0.3]).unwrap();
        assert!(p.distance < 1e-6, "{p:?}");
        let p = project(&tri, &[1.0, 1.0]).unwrap();
        assert!((p.distance - 0.5f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn gamma_star_examples() {
        let c = LinearConstraints::new(1, vec![vec![1.0]], vec![0.8]).unwrap();
        let inst = interval(Objective::quadratic(vec![0.3]), c);
        let gs = solve_gamma_star(&inst, &inst.mixture_polytope()).unwrap();
        assert!((gs.point[0] - 0.3).abs() < 1e-6);
        assert!(gs.value < 1e-7);

        let c = LinearConstraints::new(1, vec![vec![1.0]], vec![0.5]).unwrap();
        let inst = interval(Objective::Linear { c: vec![-1.0] }, c);
        let gs = solve_gamma_star(&inst, &inst.mixture_polytope()).unwrap();
        assert!((gs.point[0] - 0.5).abs() < 1e-9);
        assert!((gs.value + 0.5).abs() < 1e-9);
    }

    #[test]
    fn gamma_star_refuses_nonconvex() {
        let inst = interval(
            Objective::Sigmoidal(crate::model::SigmoidalUtility::uniform(1)),
            LinearConstraints::none(1),
        );
        assert!(matches!(
            solve_gamma_star(&inst, &inst.mixture_polytope()),
            Err(Error::NonConvex)
        ));
    }

    #[test]
    fn slater_examples() {
        let c = LinearConstraints::new(1, vec![vec![1.0]], vec![0.5]).unwrap();
        let inst = interval(Objective::quadratic(vec![0.0]), c);
        let cert = certify_slater(&inst, &inst.mixture_polytope()).unwrap().unwrap();
        assert!((cert.margin - 0.5).abs() < 1e-12);
        assert!(cert.mean[0].abs() < 1e-12);

        let c = LinearConstraints::new(1, vec![vec![1.0]], vec![0.0]).unwrap();
        let inst = interval(Objective::quadratic(vec![0.0]), c);
        assert!(certify_slater(&inst, &inst.mixture_polytope()).unwrap().is_none());
    }

    #[test]
    fn lagrange_on_active_constraint() {
        // min (γ − 0.3)² s.t. γ <= 0.2: λ = 2·0.1 = 0.2
        let c = LinearConstraints::new(1, vec![vec![1.0]], vec![0.2]).unwrap();
        let inst = interval(Objective::quadratic(vec![0.3]), c);
        let poly = inst.mixture_polytope();
        let gs = solve_gamma_star(&inst, &poly).unwrap();
        let cert = lagrange_certificate(&inst, &poly, &gs.point, 200, 1).unwrap();
        assert!((cert.lambda[0] - 0.2).abs() < 1e-6, "{cert:?}");
        assert!(cert.checked_gap < 1e-6);
    }
}
