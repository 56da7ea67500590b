use pdfw_core::diagnostics::{
    fw_gap, solve_gamma_star, LinearProgram, LpStatus, Relation, Sense,
};
use pdfw_core::linalg;
use pdfw_core::model::{rng_stream, uniform01, ProblemInstance, RngStream};
use pdfw_core::problems::{
    make_convex_scheduling, make_random_finite, make_sigmoidal_scheduling, ObjectiveFamily,
};
use proptest::prelude::*;

/// Shrinks a member of the polytope toward the origin until it satisfies
/// every constraint. The origin is a feasible member of these instances.
fn feasible_point(inst: &ProblemInstance, seed: u64) -> Vec<f64> {
    let poly = inst.mixture_polytope();
    let mut rng = rng_stream(seed, RngStream::Generator);
    let g = poly.sample(&mut rng);
    let c = inst.constraints();
    let mut s = uniform01(&mut rng);
    for (row, b) in c.rows().iter().zip(c.rhs()) {
        let a = linalg::dot(row, &g);
        if a > 0.0 {
            s = s.min(b / a);
        }
    }
    linalg::scale(&g, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn lp_strong_duality(
        n in 1usize..5,
        m in 1usize..5,
        seed in any::<u64>(),
    ) {
        let mut rng = rng_stream(seed, RngStream::Generator);
        let obj: Vec<f64> = (0..n).map(|_| uniform01(&mut rng) * 2.0 - 0.5).collect();
        let mut lp = LinearProgram::new(Sense::Maximize, obj);
        for _ in 0..m {
            let row: Vec<f64> = (0..n).map(|_| 0.1 + uniform01(&mut rng)).collect();
            lp.constrain(row, Relation::Le, 0.5 + uniform01(&mut rng));
        }
        if uniform01(&mut rng) < 0.5 {
            let row: Vec<f64> = (0..n).map(|_| uniform01(&mut rng)).collect();
            lp.constrain(row, Relation::Ge, 0.05);
        }
        let sol = lp.solve().unwrap();
        prop_assume!(sol.status == LpStatus::Optimal);
        prop_assert!((sol.value - sol.dual_value).abs() <= 1e-7, "{} vs {}", sol.value, sol.dual_value);
    }

    #[test]
    fn gap_nonnegative_at_feasible_points(
        d in 1usize..4,
        s in 1usize..4,
        v in 1usize..4,
        nc in 1usize..3,
        quad in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let fam = if quad { ObjectiveFamily::Quadratic } else { ObjectiveFamily::Sigmoidal };
        let inst = make_random_finite(d, s, v, nc, fam, seed).unwrap();
        let poly = inst.mixture_polytope();
        let gamma = feasible_point(&inst, seed);
        prop_assert!(fw_gap(&inst, &poly, &gamma).unwrap() >= -1e-9);
    }

    #[test]
    fn gap_bounds_suboptimality(d in 1usize..4, s in 1usize..4, seed in 0u64..500) {
        let inst = make_random_finite(d, s, 3, 2, ObjectiveFamily::Quadratic, seed).unwrap();
        let poly = inst.mixture_polytope();
        let gs = solve_gamma_star(&inst, &poly).unwrap();
        prop_assert!(gs.gap <= 1e-6);
        let gamma = feasible_point(&inst, seed);
        let gap = fw_gap(&inst, &poly, &gamma).unwrap();
        prop_assert!(gap >= inst.objective().value(&gamma) - gs.value - 1e-9);
    }
}

#[test]
fn generated_vertices_in_unit_cube() {
    for seed in 0..10 {
        for inst in [
            make_convex_scheduling(4, 3, seed).unwrap(),
            make_sigmoidal_scheduling(2, 2, seed).unwrap(),
            make_random_finite(3, 3, 4, 2, ObjectiveFamily::Sigmoidal, seed).unwrap(),
        ] {
            for v in inst.hull_generators() {
                assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
            }
            let bc = inst.bounds().unwrap();
            assert!(bc.d <= 2.0 * (inst.dim() as f64).sqrt());
            assert!([bc.m, bc.k, bc.b, bc.d, bc.l].iter().all(|x| x.is_finite()));
        }
    }
}
