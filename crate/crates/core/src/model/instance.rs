use crate::diagnostics::{BoundConstants, MixturePolytope};
use crate::error::{check_dim, Error, Result};
use crate::model::{DecisionSet, LinearConstraints, Objective, StateModel};

/// Immutable description of a constrained stochastic program: the state
/// process, one decision set per state, the objective and `Aγ <= b`.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    name: String,
    state_model: StateModel,
    decision_sets: Vec<DecisionSet>,
    objective: Objective,
    constraints: LinearConstraints,
    bounds: Option<BoundConstants>,
}

impl ProblemInstance {
    /// Validates dimensions and that the origin is an achievable mean.
    pub fn new(
        name: impl Into<String>,
        state_model: StateModel,
        decision_sets: Vec<DecisionSet>,
        objective: Objective,
        constraints: LinearConstraints,
    ) -> Result<Self> {
        check_dim("decision sets per state", state_model.len(), decision_sets.len())?;
        objective.validate()?;
        let d = objective.dim();
        for set in &decision_sets {
            set.validate()?;
            check_dim("decision set", d, set.dim())?;
        }
        check_dim("constraints", d, constraints.dim())?;
        let inst = Self {
            name: name.into(),
            state_model,
            decision_sets,
            objective,
            constraints,
            bounds: None,
        };
        if !inst.mixture_polytope().contains(&vec![0.0; d], 1e-9)? {
            return Err(Error::InvalidInstance(
                "the origin is not an achievable mean".into(),
            ));
        }
        Ok(inst)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn n_states(&self) -> usize {
        self.state_model.len()
    }

    pub fn state_model(&self) -> &StateModel {
        &self.state_model
    }

    pub fn decision_sets(&self) -> &[DecisionSet] {
        &self.decision_sets
    }

    pub fn decision_set(&self, state: usize) -> &DecisionSet {
        &self.decision_sets[state]
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn constraints(&self) -> &LinearConstraints {
        &self.constraints
    }

    pub fn bounds(&self) -> Option<&BoundConstants> {
        self.bounds.as_ref()
    }

    pub fn with_bounds(mut self, bounds: BoundConstants) -> Self {
        self.bounds = Some(bounds);
        self
    }

    /// The achievable-mean polytope as a probability-weighted sum of the
    /// per-state vertex hulls.
    pub fn mixture_polytope(&self) -> MixturePolytope {
        MixturePolytope::new(
            self.state_model.probabilities().to_vec(),
            self.decision_sets.iter().map(DecisionSet::vertices).collect(),
        )
    }

    /// Generators of the ambient hull: the origin and every decision vertex,
    /// without duplicates.
    pub fn hull_generators(&self) -> Vec<Vec<f64>> {
        let mut gens = vec![vec![0.0; self.dim()]];
        for set in &self.decision_sets {
            for v in set.vertices() {
                if !gens.contains(&v) {
                    gens.push(v);
                }
            }
        }
        gens
    }

    /// Coordinatewise bounding box of the ambient hull.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![0.0f64; d];
        let mut hi = vec![0.0f64; d];
        for g in self.hull_generators() {
            for j in 0..d {
                lo[j] = lo[j].min(g[j]);
                hi[j] = hi[j].max(g[j]);
            }
        }
        (lo, hi)
    }

    pub fn is_deterministic(&self) -> bool {
        self.n_states() == 1
    }
}
