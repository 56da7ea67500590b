use rand::Rng;

use crate::distributed::{GraphTopology, Node};
use crate::error::{check_dim, Error, Result};
use crate::model::{
    rng_stream, DecisionSet, LinearConstraints, Objective, ProblemInstance, RngStream, StateModel,
};

/// Agents on a graph sharing one i.i.d. state process and a shared variable
/// `θ ∈ Θ ⊂ R^p` (a box containing the origin).
#[derive(Clone, Debug)]
pub struct DistributedProblem {
    pub graph: GraphTopology,
    pub state_model: StateModel,
    pub nodes: Vec<Node>,
    /// `None` when `p = 0`.
    pub theta: Option<DecisionSet>,
}

impl DistributedProblem {
    pub fn new(
        graph: GraphTopology,
        state_model: StateModel,
        nodes: Vec<Node>,
        theta_lower: Vec<f64>,
        theta_upper: Vec<f64>,
    ) -> Result<Self> {
        check_dim("nodes", graph.len(), nodes.len())?;
        check_dim("theta bounds", theta_lower.len(), theta_upper.len())?;
        let p = theta_lower.len();
        let theta = if p == 0 {
            None
        } else {
            if theta_lower.iter().zip(&theta_upper).any(|(l, u)| *l > 0.0 || *u < 0.0) {
                return Err(Error::InvalidInstance("theta box must contain the origin".into()));
            }
            Some(DecisionSet::boxed(theta_lower, theta_upper)?)
        };
        for n in &nodes {
            n.validate(state_model.len(), p)?;
        }
        Ok(Self {
            graph,
            state_model,
            nodes,
            theta,
        })
    }

    pub fn theta_dim(&self) -> usize {
        self.theta.as_ref().map_or(0, DecisionSet::dim)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Offset of node `i`'s `[γ_i; θ_i]` block in the stacked vector.
    pub fn offsets(&self) -> Vec<usize> {
        let p = self.theta_dim();
        let mut out = Vec::with_capacity(self.nodes.len() + 1);
        let mut off = 0;
        for n in &self.nodes {
            out.push(off);
            off += n.gamma_dim() + p;
        }
        out.push(off);
        out
    }

    /// The equivalent centralized instance over the stacked variable
    /// `[γ_1; θ_1; ...; γ_K; θ_K]` with one constraint `θ_i[k] − θ_j[k] <= 0`
    /// per ordered neighbor pair and coordinate.
    pub fn stacked_instance(&self) -> Result<ProblemInstance> {
        let p = self.theta_dim();
        let offsets = self.offsets();
        let dim = offsets[self.nodes.len()];
        let mut sets = Vec::with_capacity(self.state_model.len());
        for s in 0..self.state_model.len() {
            let mut blocks = Vec::new();
            for n in &self.nodes {
                blocks.push(n.decision_sets[s].clone());
                if let Some(th) = &self.theta {
                    blocks.push(th.clone());
                }
            }
            sets.push(DecisionSet::product(blocks)?);
        }
        let objective = Objective::BlockSum {
            blocks: self.nodes.iter().map(|n| n.objective.clone()).collect(),
        };
        let mut rows = Vec::new();
        for (i, j) in self.graph.ordered_pairs() {
            for k in 0..p {
                let mut row = vec![0.0; dim];
                row[offsets[i] + self.nodes[i].gamma_dim() + k] = 1.0;
                row[offsets[j] + self.nodes[j].gamma_dim() + k] = -1.0;
                rows.push(row);
            }
        }
        let n_rows = rows.len();
        ProblemInstance::new(
            "stacked",
            self.state_model.clone(),
            sets,
            objective,
            LinearConstraints::new(dim, rows, vec![0.0; n_rows])?,
        )
    }
}

/// `K` nodes on a cycle, one scalar decision each and a scalar shared
/// variable in `[0, 1]`. Node `i` serves at a random rate in `[0.2, 1]`
/// or idles, and has `f_i(γ, θ) = (γ − θ)² + (θ − g_i)²` with `g_i` uniform
/// in `[0.2, 0.8]`, so the nodes disagree on where `θ` should sit.
pub fn make_cycle_consensus(k: usize, n_states: usize, seed: u64) -> Result<DistributedProblem> {
    if n_states == 0 {
        return Err(Error::InvalidConfig("need at least one state".into()));
    }
    let mut rng = rng_stream(seed, RngStream::Generator);
    let raw: Vec<f64> = (0..n_states).map(|_| rng.random_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    let mut probs: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let head: f64 = probs[..n_states - 1].iter().sum();
    probs[n_states - 1] = 1.0 - head;
    let mut nodes = Vec::with_capacity(k);
    for _ in 0..k {
        let sets = (0..n_states)
            .map(|_| DecisionSet::finite(vec![vec![0.0], vec![rng.random_range(0.2..1.0)]]))
            .collect::<Result<Vec<_>>>()?;
        let g = rng.random_range(0.2..0.8);
        nodes.push(Node {
            decision_sets: sets,
            objective: Objective::QuadraticForm {
                hessian: vec![vec![2.0, -2.0], vec![-2.0, 4.0]],
                linear: vec![0.0, -2.0 * g],
            },
        });
    }
    DistributedProblem::new(
        GraphTopology::cycle(k)?,
        StateModel::from_probabilities(probs)?,
        nodes,
        vec![0.0],
        vec![1.0],
    )
}
