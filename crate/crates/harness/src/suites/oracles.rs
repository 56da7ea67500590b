use anyhow::{Context, Result};
use pdfw_core::diagnostics::{
    dist_to_polytope, fw_gap, gap_perturbation_check, PROPERTY_SLACK,
};
use pdfw_core::model::{rng_stream, uniform01, RngStream};
use pdfw_core::problems::{make_random_finite, ObjectiveFamily};

use super::{sigmoidal_instance, BruteHull};
use crate::report::{Check, SuiteReport};

const AGREE_TOL: f64 = 1e-4;
const N_INSTANCES: u64 = 24;
const POINTS_PER_INSTANCE: usize = 12;

/// LP/Frank-Wolfe gap and distance against exhaustive enumeration on small
/// random instances.
pub fn oracle_equivalence() -> Result<SuiteReport> {
    let mut worst_gap = 0.0f64;
    let mut worst_dist = 0.0f64;
    let mut points = 0usize;
    for k in 0..N_INSTANCES {
        let d = 1 + (k % 2) as usize;
        let states = 1 + (k % 3) as usize;
        let verts = 2 + ((k / 3) % 2) as usize;
        let cons = 1 + ((k / 2) % 2) as usize;
        let family = if (k / 4) % 2 == 0 { ObjectiveFamily::Sigmoidal } else { ObjectiveFamily::Quadratic };
        let inst = make_random_finite(d, states, verts, cons, family, 500 + k)?;
        let poly = inst.mixture_polytope();
        let brute = BruteHull::new(&inst).context("brute-force hull needs d <= 2")?;
        let mut rng = rng_stream(k, RngStream::Generator);
        for p in 0..POINTS_PER_INSTANCE {
            let gamma: Vec<f64> = if p % 2 == 0 {
                poly.sample(&mut rng)
            } else {
                (0..d).map(|_| -0.4 + 1.8 * uniform01(&mut rng)).collect()
            };
            let lp_gap = fw_gap(&inst, &poly, &gamma)?;
            let bf_gap = brute.fw_gap(&inst, &gamma).context("origin is always feasible")?;
            worst_gap = worst_gap.max((lp_gap - bf_gap).abs());
            let fw_dist = dist_to_polytope(&poly, &gamma)?;
            worst_dist = worst_dist.max((fw_dist - brute.dist(&gamma)).abs());
            points += 1;
        }
    }
    let mut report = SuiteReport::new("oracles");
    let detail = format!("{N_INSTANCES} instances, {points} points");
    report.push(Check::le("fw_gap vs enumeration", worst_gap, AGREE_TOL).with_detail(detail));
    report.push(Check::le("dist vs enumeration", worst_dist, AGREE_TOL));
    Ok(report)
}

/// `|G(γ) − G(γ̃)| <= (2DL + M)‖γ − γ̃‖` on 100 pairs: 80 members with a
/// nearby perturbation at scales from 1e-4 to 1, and 20 independent points
/// of the bounding box.
pub fn perturbation() -> Result<SuiteReport> {
    let inst = sigmoidal_instance();
    let poly = inst.mixture_polytope();
    let bc = inst.bounds().cloned().expect("generated instances carry bounds");
    let (lo, hi) = inst.bounding_box();
    let d = inst.dim();
    let mut rng = rng_stream(11, RngStream::Generator);
    let mut pairs = Vec::with_capacity(100);
    for _ in 0..80 {
        let a = poly.sample(&mut rng);
        let scale = 10f64.powf(-4.0 + 4.0 * uniform01(&mut rng));
        let b: Vec<f64> = a.iter().map(|x| x + scale * (2.0 * uniform01(&mut rng) - 1.0)).collect();
        pairs.push((a, b));
    }
    let mut in_box = || -> Vec<f64> {
        (0..d).map(|j| lo[j] + (hi[j] - lo[j]) * uniform01(&mut rng)).collect()
    };
    for _ in 0..20 {
        let a = in_box();
        let b = in_box();
        pairs.push((a, b));
    }
    let r = gap_perturbation_check(&inst, &poly, &bc, &pairs)?;
    let mut report = SuiteReport::new("perturbation");
    report.push(
        Check::le("gap Lipschitz excess", r.max_excess, PROPERTY_SLACK)
            .with_detail(format!("{} pairs", r.pairs)),
    );
    Ok(report)
}
