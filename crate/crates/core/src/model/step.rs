use crate::error::{check_dim, Result};
use crate::model::{AlgoConfig, LinearConstraints, ProblemInstance, QueueState};

/// `V * grad + Aᵀq`: the linear cost minimized in each slot.
pub fn pdfw_cost(v: f64, grad: &[f64], q: &QueueState, c: &LinearConstraints) -> Result<Vec<f64>> {
    check_dim("gradient", c.dim(), grad.len())?;
    check_dim("queue", c.len(), q.len())?;
    let mut cost: Vec<f64> = grad.iter().map(|g| v * g).collect();
    c.add_transpose_mul(q.as_slice(), &mut cost);
    Ok(cost)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutput {
    pub x: Vec<f64>,
    pub gamma: Vec<f64>,
    pub queue: QueueState,
}

/// One slot of the primal-dual Frank-Wolfe recursion with reusable scratch
/// buffers. Runners drive this directly; [`pdfw_step`] wraps it.
pub struct Stepper<'a> {
    inst: &'a ProblemInstance,
    v: f64,
    eta: f64,
    grad: Vec<f64>,
    cost: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(inst: &'a ProblemInstance, v: f64, eta: f64) -> Self {
        let d = inst.dim();
        Self {
            inst,
            v,
            eta,
            grad: vec![0.0; d],
            cost: vec![0.0; d],
        }
    }

    /// Writes `x_t` for the observed `state` given `γ_{t-1}` and `Q(t)`.
    pub fn decide(
        &mut self,
        state: usize,
        gamma: &[f64],
        q: &QueueState,
        x: &mut [f64],
    ) -> Result<()> {
        let inst = self.inst;
        inst.objective().gradient_into(gamma, &mut self.grad);
        for (c, g) in self.cost.iter_mut().zip(&self.grad) {
            *c = self.v * g;
        }
        inst.constraints()
            .add_transpose_mul(q.as_slice(), &mut self.cost);
        inst.decision_set(state).lmo_into(&self.cost, x)
    }

    /// Observes `state`, writes `x_t` into `x`, and advances `gamma` from
    /// `γ_{t-1}` to `γ_t` and `q` from `Q(t)` to `Q(t+1)`. `γ` is updated
    /// before `Q`; both depend on `x_t` only.
    pub fn step(
        &mut self,
        state: usize,
        gamma: &mut [f64],
        q: &mut QueueState,
        x: &mut [f64],
    ) -> Result<()> {
        self.decide(state, gamma, q, x)?;
        for (g, xj) in gamma.iter_mut().zip(x.iter()) {
            *g = (1.0 - self.eta) * *g + self.eta * xj;
        }
        q.advance(x, self.inst.constraints());
        Ok(())
    }
}

pub fn pdfw_step(
    inst: &ProblemInstance,
    cfg: &AlgoConfig,
    gamma_prev: &[f64],
    q: &QueueState,
    state: usize,
) -> Result<StepOutput> {
    check_dim("gamma", inst.dim(), gamma_prev.len())?;
    check_dim("queue", inst.constraints().len(), q.len())?;
    let (v, eta) = cfg.params();
    let mut stepper = Stepper::new(inst, v, eta);
    let mut gamma = gamma_prev.to_vec();
    let mut queue = q.clone();
    let mut x = vec![0.0; inst.dim()];
    stepper.step(state, &mut gamma, &mut queue, &mut x)?;
    Ok(StepOutput { x, gamma, queue })
}
