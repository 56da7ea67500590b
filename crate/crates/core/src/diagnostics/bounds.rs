use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{rng_stream, ProblemInstance, RngStream};

/// The boundedness constants the convergence bounds are stated in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    /// sup ‖∇f‖ over the ambient hull.
    pub m: f64,
    /// sup |f| over the ambient hull.
    pub k: f64,
    /// sup ‖Aγ − b‖ over the ambient hull.
    pub b: f64,
    /// Diameter of the ambient hull.
    pub d: f64,
    /// Gradient Lipschitz constant.
    pub l: f64,
    /// False when M and K are sampled estimates rather than closed-form
    /// upper bounds.
    pub certified: bool,
}

const FALLBACK_SAMPLES: usize = 20_000;

pub fn compute_bounds(inst: &ProblemInstance) -> BoundConstants {
    let gens = inst.hull_generators();
    let mut d = 0.0f64;
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            d = d.max(linalg::dist(a, b));
        }
    }
    // Residual norms are convex in γ so the sup over the hull sits on a
    // generator.
    let c = inst.constraints();
    let b = gens
        .iter()
        .map(|g| linalg::norm(&c.residuals(g)))
        .fold(0.0f64, f64::max);

    let obj = inst.objective();
    let (lo, hi) = inst.bounding_box();
    let (m, k, certified) = match obj.box_bounds(&lo, &hi) {
        Some((m, k)) => (m, k, true),
        None => {
            let mut rng = rng_stream(0, RngStream::Generator);
            let mut m = 0.0f64;
            let mut k = 0.0f64;
            let mut x = vec![0.0; lo.len()];
            for _ in 0..FALLBACK_SAMPLES {
                for j in 0..x.len() {
                    x[j] = lo[j] + (hi[j] - lo[j]) * rng.random::<f64>();
                }
                m = m.max(linalg::norm(&obj.gradient(&x)));
                k = k.max(obj.value(&x).abs());
            }
            for g in &gens {
                m = m.max(linalg::norm(&obj.gradient(g)));
                k = k.max(obj.value(g).abs());
            }
            (m, k, false)
        }
    };
    BoundConstants {
        m,
        k,
        b,
        d,
        l: obj.smoothness(),
        certified,
    }
}

/// The constant `C_i` of the Slater-improved violation bound.
pub fn slater_constant(bc: &BoundConstants, eps: f64, a_norm: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidConfig(format!("slater margin must be positive, got {eps}")));
    }
    let b2 = bc.b * bc.b;
    Ok((b2 + bc.l * bc.d * bc.d + 2.0 * bc.m * bc.d) / eps
        + bc.b
        + 4.0 * bc.k
        + eps
        + (8.0 * b2 / eps) * (1.0 + 32.0 * b2 / (eps * eps) * std::f64::consts::E).ln()
        + a_norm * bc.d)
}

/// Closed-form right-hand sides of the convergence bounds at horizon `T`.
pub mod theorems {
    use super::BoundConstants;

    fn t13(t: f64) -> f64 {
        t.cbrt()
    }

    /// General `(V, η)` cost bound and the `E‖Q(T)‖²/T²` bound.
    pub fn convex_general(bc: &BoundConstants, v: f64, eta: f64, t: f64) -> (f64, f64) {
        let (m, k, b, d, l) = (bc.m, bc.k, bc.b, bc.d, bc.l);
        let subopt = (2.0 * k + m * d) / (eta * t) + b * b / (2.0 * v) + l * d * d * eta / 2.0;
        let q2 = 4.0 * k * v / t + 4.0 * k * v / (t * t * eta) + b * b / t + l * d * d * v * eta / t;
        (subopt, q2)
    }

    /// Convex case with `V = T^{1/3}`, `η = T^{-2/3}`: (suboptimality,
    /// per-constraint violation).
    pub fn convex_cube_root(bc: &BoundConstants, t: f64) -> (f64, f64) {
        let (m, k, b, d, l) = (bc.m, bc.k, bc.b, bc.d, bc.l);
        let c = t13(t);
        let subopt = (2.0 * k + m * d + b * b / 2.0 + l * d * d / (2.0 * c)) / c;
        let viol = (4.0 * k + 4.0 * k / c + b * b / c + l * d * d / (c * c)).sqrt() / c;
        (subopt, viol)
    }

    /// Convex case with `V = √T`, `η = 1/√T`, given a Lagrange multiplier.
    pub fn convex_square_root(
        bc: &BoundConstants,
        t: f64,
        lambda_norm: f64,
        at_lambda_norm: f64,
    ) -> (f64, f64) {
        let (m, k, b, d, l) = (bc.m, bc.k, bc.b, bc.d, bc.l);
        let s = t.sqrt();
        let subopt = (2.0 * k + m * d + b * b / 2.0 + l * d * d / 2.0) / s;
        let viol = 2.0 * lambda_norm / s
            + ((2.0 * at_lambda_norm * d + 4.0 * k + b * b + l * d * d) / t).sqrt();
        (subopt, viol)
    }

    /// Non-convex case with `V = T^{1/3}`: (gap, violation of constraint
    /// with row norm `a_norm`, squared distance).
    pub fn nonconvex_cube_root(bc: &BoundConstants, t: f64, a_norm: f64) -> (f64, f64, f64) {
        let (m, k, b, d, l) = (bc.m, bc.k, bc.b, bc.d, bc.l);
        let c = t13(t);
        let gap = (2.0 * k + b * b + l * d * d / (2.0 * c)) / c;
        let viol = ((2.0 * m * d + (4.0 * k + b * b) / c + l * d * d / (c * c)).sqrt() + a_norm * d) / c;
        (gap, viol, d * d / (c * c))
    }

    /// Non-convex case under Slater with `V = √T`: (gap, violation given
    /// `C_i`, squared distance).
    pub fn slater_square_root(bc: &BoundConstants, t: f64, c_i: f64) -> (f64, f64, f64) {
        let s = t.sqrt();
        let gap = (2.0 * bc.k + bc.b * bc.b + bc.l * bc.d * bc.d) / s;
        (gap, c_i / s, bc.d * bc.d / s)
    }

    /// Deterministic programs, `V = √T`: the gap bound.
    pub fn deterministic_square_root_gap(bc: &BoundConstants, t: f64) -> f64 {
        (2.0 * bc.k + bc.b * bc.b + bc.l * bc.d * bc.d / 2.0) / t.sqrt()
    }

    /// `E dist(γ_α)² <= η D²`.
    pub fn path_average(bc: &BoundConstants, eta: f64) -> f64 {
        eta * bc.d * bc.d
    }

    /// Tracking error bound for the two-phase scheme.
    pub fn tracking(bc: &BoundConstants, t: f64) -> f64 {
        (2f64.sqrt() + 1.0) * bc.d / t13(t)
    }

    /// `D²(1 + ln T)/T`.
    pub fn improved_fw(bc: &BoundConstants, t: f64) -> f64 {
        bc.d * bc.d * (1.0 + t.ln()) / t
    }

    /// Lipschitz constant of the FW gap in γ.
    pub fn gap_lipschitz(bc: &BoundConstants) -> f64 {
        2.0 * bc.d * bc.l + bc.m
    }
}
