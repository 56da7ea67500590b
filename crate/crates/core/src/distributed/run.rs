use std::time::Instant;

use crate::distributed::{
    edge_queue_update, node_step_theta, node_step_x, DistributedProblem, NodeQueues,
};
use crate::error::Result;
use crate::linalg;
use crate::model::{
    rng_stream, uniform_index, AlgoConfig, QueueState, RngStream, RunTrace, Series,
};

/// A distributed run recorded in stacked form: slot `t` of `trace.xs` is
/// `[x_1; θ_1; ...; x_K; θ_K]`, `trace.gammas` holds `[γ_i; β_i]` blocks and
/// `trace.queues` lists `Q_ij` for ordered pairs in lexicographic order.
#[derive(Clone, Debug)]
pub struct DistributedRun {
    pub trace: RunTrace,
    offsets: Vec<usize>,
    gamma_dims: Vec<usize>,
    p: usize,
    pairs: Vec<(usize, usize)>,
    pub wallclock: f64,
}

impl DistributedRun {
    fn block<'a>(&self, row: &'a [f64], i: usize) -> (&'a [f64], &'a [f64]) {
        let o = self.offsets[i];
        let d = self.gamma_dims[i];
        (&row[o..o + d], &row[o + d..o + d + self.p])
    }

    pub fn n_nodes(&self) -> usize {
        self.gamma_dims.len()
    }

    /// `(γ^{(i)}_α, β^{(i)}_α)` under the common output index.
    pub fn output(&self, i: usize) -> (Vec<f64>, Vec<f64>) {
        let (g, b) = self.block(&self.trace.gamma_alpha, i);
        (g.to_vec(), b.to_vec())
    }

    /// `E_α β^{(i)}_α`, the mean of `β^{(i)}_{-1..T-2}`.
    pub fn beta_path_mean(&self, i: usize) -> Vec<f64> {
        let mean = self.trace.path_mean();
        self.block(&mean, i).1.to_vec()
    }

    pub fn theta(&self, t: usize, i: usize) -> &[f64] {
        self.block(self.trace.x(t), i).1
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// `min_k [Q_ij(T)[k] − Σ_t (θ_i − θ_j)[k]]` over all ordered pairs.
    pub fn edge_queue_slack(&self) -> f64 {
        let q = self.trace.final_queue().as_slice();
        let mut worst = f64::INFINITY;
        for (e, &(i, j)) in self.pairs.iter().enumerate() {
            for k in 0..self.p {
                let sum: f64 = (0..self.trace.horizon())
                    .map(|t| self.theta(t, i)[k] - self.theta(t, j)[k])
                    .sum();
                worst = worst.min(q[e * self.p + k] - sum);
            }
        }
        worst
    }

    /// Largest `|E_α β^{(i)}_α − E_α β^{(j)}_α|` over graph edges.
    pub fn consensus_residual(&self) -> f64 {
        let mean = self.trace.path_mean();
        let mut worst = 0.0f64;
        for &(i, j) in &self.pairs {
            let bi = self.block(&mean, i).1;
            let bj = self.block(&mean, j).1;
            worst = worst.max(linalg::max_abs_diff(bi, bj));
        }
        worst
    }
}

/// Synchronous rounds of the per-agent algorithm. Every node reads only its
/// own block, its decision set for the common state and the queues on its
/// incident edges; one shared α picks the output slot everywhere.
pub fn run_distributed(prob: &DistributedProblem, cfg: &AlgoConfig) -> Result<DistributedRun> {
    cfg.validate()?;
    let start = Instant::now();
    let (v, eta) = cfg.params();
    let horizon = cfg.horizon;
    let offsets = prob.offsets();
    let dim = offsets[prob.n_nodes()];
    let p = prob.theta_dim();
    let gamma_dims: Vec<usize> = prob.nodes.iter().map(|n| n.gamma_dim()).collect();
    let pairs = prob.graph.ordered_pairs();
    let pair_index = |i: usize, j: usize| pairs.binary_search(&(i, j)).expect("edge pair");

    let mut sampler = prob.state_model.sampler(cfg.seed, RngStream::States);
    let mut states = Vec::with_capacity(horizon);
    let mut xs = Series::with_capacity(dim, horizon);
    let mut gammas = Series::with_capacity(dim, horizon + 1);
    let mut queues = Vec::with_capacity(horizon + 1);
    let mut gamma = vec![0.0; dim];
    let mut q = vec![0.0; pairs.len() * p];
    let mut x = vec![0.0; dim];
    let mut x_sum = vec![0.0; dim];
    gammas.push(&gamma);
    queues.push(QueueState::from_vec(q.clone()));

    for _ in 0..horizon {
        let s = sampler.next_state();
        // Step 1 and 2 at every node against the previous round's state.
        for (i, node) in prob.nodes.iter().enumerate() {
            let o = offsets[i];
            let d = gamma_dims[i];
            let joint = &gamma[o..o + d + p];
            let grad = node.objective.gradient(joint);
            node_step_x(&node.decision_sets[s], v, &grad, &mut x[o..o + d])?;
            if let Some(th) = &prob.theta {
                let links: Vec<(usize, &[f64], &[f64])> = prob
                    .graph
                    .neighbors(i)
                    .iter()
                    .map(|&j| {
                        let a = pair_index(i, j) * p;
                        let b = pair_index(j, i) * p;
                        (j, &q[a..a + p], &q[b..b + p])
                    })
                    .collect();
                let view = NodeQueues { node: i, links };
                node_step_theta(th, v, &grad[d..], &view, &mut x[o + d..o + d + p])?;
            }
        }
        // Round barrier: averaging and queue updates.
        for j in 0..dim {
            gamma[j] = (1.0 - eta) * gamma[j] + eta * x[j];
            x_sum[j] += x[j];
        }
        for (e, &(i, j)) in pairs.iter().enumerate() {
            let ti = offsets[i] + gamma_dims[i];
            let tj = offsets[j] + gamma_dims[j];
            edge_queue_update(&mut q[e * p..(e + 1) * p], &x[ti..ti + p], &x[tj..tj + p]);
        }
        states.push(s);
        xs.push(&x);
        gammas.push(&gamma);
        queues.push(QueueState::from_vec(q.clone()));
    }

    let x_bar: Vec<f64> = x_sum.iter().map(|s| s / horizon as f64).collect();
    let mut alpha_rng = rng_stream(cfg.seed, RngStream::Alpha);
    let idx = uniform_index(&mut alpha_rng, horizon);
    let trace = RunTrace {
        v,
        eta,
        states,
        xs,
        gamma_alpha: gammas.row(idx).to_vec(),
        gammas,
        queues,
        x_bar,
        alpha: idx as isize - 1,
    };
    Ok(DistributedRun {
        trace,
        offsets,
        gamma_dims,
        p,
        pairs,
        wallclock: start.elapsed().as_secs_f64(),
    })
}
