use pdfw_core::algorithms::{run_pdfw, run_tracking_fw};
use pdfw_core::diagnostics::compute_bounds;
use pdfw_core::distributed::{make_cycle_consensus, run_distributed};
use pdfw_core::model::{AlgoConfig, ProblemInstance, Schedule};
use pdfw_core::problems::{make_random_finite, ObjectiveFamily};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = ProblemInstance> {
    (1usize..=4, 1usize..=3, 1usize..=4, 0usize..=3, any::<bool>(), any::<u64>()).prop_map(
        |(d, s, v, n, quad, seed)| {
            let fam = if quad { ObjectiveFamily::Quadratic } else { ObjectiveFamily::Sigmoidal };
            make_random_finite(d, s, v, n, fam, seed).unwrap()
        },
    )
}

fn config() -> impl Strategy<Value = AlgoConfig> {
    (1usize..=150, any::<u64>(), 0usize..3, 0.1f64..20.0, 0.01f64..0.99).prop_map(
        |(t, seed, k, v, eta)| match k {
            0 => AlgoConfig::scheduled(t, Schedule::CubeRoot, seed),
            1 => AlgoConfig::scheduled(t, Schedule::SquareRoot, seed),
            _ => AlgoConfig::fixed(t, v, eta, seed),
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn queue_and_averaging_identities(inst in instance(), cfg in config()) {
        let r = run_pdfw(&inst, &cfg).unwrap();
        let tr = &r.trace;
        let c = inst.constraints();
        prop_assert!(tr.averaging_identity_error() <= 1e-9);
        if !c.is_empty() {
            prop_assert!(tr.min_queue_entry() >= 0.0);
            prop_assert!(tr.queue_lower_bound_slack(c) >= -1e-9);
            let b = inst.bounds().cloned().unwrap_or_else(|| compute_bounds(&inst)).b;
            prop_assert!(tr.max_queue_step() <= b * (1.0 + 1e-12));
        }
        prop_assert_eq!(tr.queue_replay_error(c), 0.0);
        prop_assert!(r.violation_replay_error(&inst) == 0.0);
        prop_assert!(tr.alpha >= -1 && tr.alpha <= cfg.horizon as isize - 2 || cfg.horizon == 1 && tr.alpha == -1);
    }

    #[test]
    fn runs_are_deterministic(inst in instance(), cfg in config()) {
        let a = run_pdfw(&inst, &cfg).unwrap();
        let b = run_pdfw(&inst, &cfg).unwrap();
        prop_assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn tracking_running_average(inst in instance(), t in 1usize..300, seed in any::<u64>()) {
        let target = vec![0.25; inst.dim()];
        let r = run_tracking_fw(&inst, &target, t, seed).unwrap();
        prop_assert!(r.identity_error <= 1e-9);
        for k in 0..t {
            let mean: Vec<f64> = (0..inst.dim())
                .map(|j| (0..=k).map(|s| r.xs.row(s)[j]).sum::<f64>() / (k + 1) as f64)
                .collect();
            for j in 0..inst.dim() {
                prop_assert!((r.gammas.row(k)[j] - mean[j]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn edge_queue_lower_bound(k in 2usize..=5, seed in any::<u64>(), t in 1usize..200) {
        let prob = make_cycle_consensus(k.max(3), 2, seed % 1000).unwrap();
        let r = run_distributed(&prob, &AlgoConfig::scheduled(t, Schedule::CubeRoot, seed)).unwrap();
        prop_assert!(r.edge_queue_slack() >= -1e-9);
        prop_assert!(r.trace.min_queue_entry() >= 0.0 || r.trace.final_queue().is_empty());
    }
}
