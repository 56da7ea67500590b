use serde::{Deserialize, Serialize};

use crate::diagnostics::{certify_slater, compute_bounds, solve_gamma_star, GammaStar, SlaterCertificate};
use crate::distributed::{DistributedProblem, GraphTopology, Node};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{DecisionSet, LinearConstraints, Objective, ProblemInstance, StateModel};

pub const SPEC_VERSION: u32 = 1;

/// Tolerance for re-verifying a declared Slater margin.
const MARGIN_TOL: f64 = 1e-6;
/// Tolerance for re-verifying a declared optimum.
const GAMMA_STAR_TOL: f64 = 1e-4;

/// Serializable description of an instance, as stored in instance files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub version: u32,
    pub name: String,
    pub dim: usize,
    pub states: Vec<StateSpec>,
    /// Absent for distributed instances, whose objective lives per node.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Objective>,
    #[serde(default)]
    pub constraints: ConstraintSpec,
    #[serde(default)]
    pub certificates: Certificates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distributed: Option<DistributedSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default)]
    pub label: String,
    pub probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<DecisionSet>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    #[serde(default)]
    pub rows: Vec<Vec<f64>>,
    #[serde(default)]
    pub rhs: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificates {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slater_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_star: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributedSpec {
    pub graph: GraphTopology,
    #[serde(default)]
    pub theta_lower: Vec<f64>,
    #[serde(default)]
    pub theta_upper: Vec<f64>,
    pub nodes: Vec<NodeSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    /// One decision set per global state.
    pub sets: Vec<DecisionSet>,
    pub objective: Objective,
}

/// A validated instance with its re-verified certificates.
#[derive(Clone, Debug)]
pub struct LoadedInstance {
    pub instance: ProblemInstance,
    pub distributed: Option<DistributedProblem>,
    pub slater: Option<SlaterCertificate>,
    pub gamma_star: Option<GammaStar>,
}

impl InstanceSpec {
    /// Describes a centralized instance, computing its certificates.
    pub fn from_instance(inst: &ProblemInstance) -> Result<Self> {
        let probs = inst.state_model().probabilities();
        let labels = inst.state_model().labels();
        let states = (0..inst.n_states())
            .map(|s| StateSpec {
                label: labels[s].clone(),
                probability: probs[s],
                set: Some(inst.decision_set(s).clone()),
            })
            .collect();
        if matches!(inst.objective(), Objective::Custom(_)) {
            return Err(Error::Unsupported("custom objectives cannot be serialized".into()));
        }
        let poly = inst.mixture_polytope();
        let slater_margin = if inst.constraints().is_empty() {
            None
        } else {
            certify_slater(inst, &poly)?.map(|c| c.margin)
        };
        let gamma_star = if inst.objective().is_convex() {
            Some(solve_gamma_star(inst, &poly)?.point)
        } else {
            None
        };
        Ok(Self {
            version: SPEC_VERSION,
            name: inst.name().to_string(),
            dim: inst.dim(),
            states,
            objective: Some(inst.objective().clone()),
            constraints: ConstraintSpec {
                rows: inst.constraints().rows().to_vec(),
                rhs: inst.constraints().rhs().to_vec(),
            },
            certificates: Certificates {
                slater_margin,
                gamma_star,
            },
            distributed: None,
        })
    }

    pub fn from_distributed(name: &str, prob: &DistributedProblem) -> Result<Self> {
        let labels = prob.state_model.labels();
        let probs = prob.state_model.probabilities();
        let (theta_lower, theta_upper) = match &prob.theta {
            Some(DecisionSet::Box { lower, upper }) => (lower.clone(), upper.clone()),
            _ => (Vec::new(), Vec::new()),
        };
        let stacked = prob.stacked_instance()?;
        Ok(Self {
            version: SPEC_VERSION,
            name: name.to_string(),
            dim: stacked.dim(),
            states: (0..labels.len())
                .map(|s| StateSpec {
                    label: labels[s].clone(),
                    probability: probs[s],
                    set: None,
                })
                .collect(),
            objective: None,
            constraints: ConstraintSpec::default(),
            certificates: Certificates::default(),
            distributed: Some(DistributedSpec {
                graph: prob.graph.clone(),
                theta_lower,
                theta_upper,
                nodes: prob
                    .nodes
                    .iter()
                    .map(|n| NodeSpec {
                        sets: n.decision_sets.clone(),
                        objective: n.objective.clone(),
                    })
                    .collect(),
            }),
        })
    }

    /// Builds the instance and re-verifies every declared certificate.
    pub fn load(&self) -> Result<LoadedInstance> {
        if self.version != SPEC_VERSION {
            return Err(Error::InvalidInstance(format!(
                "unsupported instance version {} (expected {SPEC_VERSION})",
                self.version
            )));
        }
        let labels = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| if s.label.is_empty() { format!("s{i}") } else { s.label.clone() })
            .collect();
        let state_model =
            StateModel::new(labels, self.states.iter().map(|s| s.probability).collect())?;

        let (instance, distributed) = match &self.distributed {
            Some(ds) => {
                if self.objective.is_some() || self.states.iter().any(|s| s.set.is_some()) {
                    return Err(Error::InvalidInstance(
                        "distributed instances keep sets and objectives per node".into(),
                    ));
                }
                let nodes = ds
                    .nodes
                    .iter()
                    .map(|n| Node {
                        decision_sets: n.sets.clone(),
                        objective: n.objective.clone(),
                    })
                    .collect();
                let prob = DistributedProblem::new(
                    ds.graph.clone(),
                    state_model,
                    nodes,
                    ds.theta_lower.clone(),
                    ds.theta_upper.clone(),
                )?;
                let inst = prob.stacked_instance()?;
                if inst.dim() != self.dim {
                    return Err(Error::DimensionMismatch {
                        context: "stacked dimension",
                        expected: self.dim,
                        got: inst.dim(),
                    });
                }
                (inst, Some(prob))
            }
            None => {
                let objective = self
                    .objective
                    .clone()
                    .ok_or_else(|| Error::InvalidInstance("missing objective".into()))?;
                let sets = self
                    .states
                    .iter()
                    .map(|s| {
                        s.set.clone().ok_or_else(|| {
                            Error::InvalidInstance(format!("state '{}' has no decision set", s.label))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let constraints = LinearConstraints::new(
                    self.dim,
                    self.constraints.rows.clone(),
                    self.constraints.rhs.clone(),
                )?;
                let inst = ProblemInstance::new(&self.name, state_model, sets, objective, constraints)?;
                (inst, None)
            }
        };
        let bounds = compute_bounds(&instance);
        let instance = instance.with_bounds(bounds);
        let poly = instance.mixture_polytope();

        let slater = match self.certificates.slater_margin {
            Some(declared) => {
                let cert = certify_slater(&instance, &poly)?.ok_or_else(|| {
                    Error::CertificateMismatch(format!(
                        "declared slater margin {declared} but no strictly feasible policy exists"
                    ))
                })?;
                if (cert.margin - declared).abs() > MARGIN_TOL {
                    return Err(Error::CertificateMismatch(format!(
                        "declared slater margin {declared}, computed {}",
                        cert.margin
                    )));
                }
                Some(cert)
            }
            None => None,
        };
        let gamma_star = match &self.certificates.gamma_star {
            Some(declared) => {
                let gs = solve_gamma_star(&instance, &poly)?;
                if declared.len() != instance.dim()
                    || linalg::dist(declared, &gs.point) > GAMMA_STAR_TOL
                {
                    return Err(Error::CertificateMismatch(format!(
                        "declared optimum {declared:?}, computed {:?}",
                        gs.point
                    )));
                }
                Some(gs)
            }
            None => None,
        };
        Ok(LoadedInstance {
            instance,
            distributed,
            slater,
            gamma_star,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_convex_scheduling;

    #[test]
    fn round_trip_reverifies() {
        let inst = make_convex_scheduling(2, 2, 4).unwrap();
        let spec = InstanceSpec::from_instance(&inst).unwrap();
        assert!(spec.certificates.slater_margin.is_some());
        let loaded = spec.load().unwrap();
        assert_eq!(loaded.instance.decision_sets(), inst.decision_sets());
        assert!(loaded.slater.is_some());
        assert!(loaded.gamma_star.is_some());
    }

    #[test]
    fn wrong_certificate_is_fatal() {
        let inst = make_convex_scheduling(2, 2, 4).unwrap();
        let mut spec = InstanceSpec::from_instance(&inst).unwrap();
        spec.certificates.slater_margin = Some(5.0);
        assert!(matches!(spec.load(), Err(Error::CertificateMismatch(_))));
        let mut spec = InstanceSpec::from_instance(&inst).unwrap();
        spec.certificates.gamma_star = Some(vec![9.0, 9.0]);
        assert!(matches!(spec.load(), Err(Error::CertificateMismatch(_))));
    }

    #[test]
    fn version_checked() {
        let inst = make_convex_scheduling(1, 1, 0).unwrap();
        let mut spec = InstanceSpec::from_instance(&inst).unwrap();
        spec.version = 7;
        assert!(spec.load().is_err());
    }
}
