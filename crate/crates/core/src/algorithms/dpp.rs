use crate::algorithms::{simulate, RunResult};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{AlgoConfig, ProblemInstance};

/// Drift-plus-penalty: each slot minimizes `V f(x) + ⟨Q(t), Ax − b⟩` by
/// enumerating the finite decision set. `γ_t` and `γ_α` are tracked with the
/// configured `η` so outputs line up with [`run_pdfw`](crate::algorithms::run_pdfw).
pub fn run_dpp(inst: &ProblemInstance, cfg: &AlgoConfig) -> Result<RunResult> {
    cfg.validate()?;
    let members: Vec<Vec<Vec<f64>>> = inst
        .decision_sets()
        .iter()
        .map(|s| {
            s.finite_members()
                .ok_or_else(|| Error::Unsupported("drift-plus-penalty needs finite decision sets".into()))
        })
        .collect::<Result<_>>()?;
    let (v, eta) = cfg.params();
    let obj = inst.objective();
    let c = inst.constraints();
    let mut r = vec![0.0; c.len()];
    simulate(inst, v, eta, cfg.horizon, cfg.seed, |s, _gamma, q, x| {
        let mut best = f64::INFINITY;
        let mut best_k = 0;
        for (k, m) in members[s].iter().enumerate() {
            c.residuals_into(m, &mut r);
            let val = v * obj.value(m) + linalg::dot(q.as_slice(), &r);
            if val < best {
                best = val;
                best_k = k;
            }
        }
        x.copy_from_slice(&members[s][best_k]);
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::run_pdfw;
    use crate::model::{DecisionSet, LinearConstraints, Objective, StateModel};
    use crate::problems::make_deterministic;

    fn seg(obj: Objective, c: LinearConstraints) -> ProblemInstance {
        make_deterministic(vec![vec![0.0, 0.0], vec![1.0, 0.0]], obj, c).unwrap()
    }

    #[test]
    fn enumerates_value() {
        let r = run_dpp(
            &seg(Objective::Linear { c: vec![-1.0, 0.0] }, LinearConstraints::none(2)),
            &AlgoConfig::fixed(1, 1.0, 0.5, 0),
        )
        .unwrap();
        assert_eq!(r.trace.x(0), &[1.0, 0.0]);

        let r = run_dpp(
            &seg(Objective::quadratic(vec![0.25, 0.0]), LinearConstraints::none(2)),
            &AlgoConfig::fixed(1, 1.0, 0.5, 0),
        )
        .unwrap();
        assert_eq!(r.trace.x(0), &[0.0, 0.0]);
    }

    #[test]
    fn matches_pdfw_for_linear_objectives() {
        let c = LinearConstraints::new(2, vec![vec![1.0, 0.0]], vec![0.3]).unwrap();
        let inst = seg(Objective::Linear { c: vec![-1.0, 0.5] }, c);
        let cfg = AlgoConfig::fixed(200, 4.0, 0.05, 11);
        let a = run_dpp(&inst, &cfg).unwrap();
        let b = run_pdfw(&inst, &cfg).unwrap();
        assert_eq!(a.trace.xs, b.trace.xs);
        assert_eq!(a.trace.queues, b.trace.queues);
    }

    #[test]
    fn rejects_continuous_sets() {
        let inst = ProblemInstance::new(
            "box",
            StateModel::deterministic(),
            vec![DecisionSet::boxed(vec![0.0], vec![1.0]).unwrap()],
            Objective::Linear { c: vec![1.0] },
            LinearConstraints::none(1),
        )
        .unwrap();
        assert!(matches!(
            run_dpp(&inst, &AlgoConfig::fixed(3, 1.0, 0.5, 0)),
            Err(Error::Unsupported(_))
        ));
    }
}
