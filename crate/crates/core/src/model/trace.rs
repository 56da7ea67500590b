use crate::linalg::{dist, max_abs_diff};
use crate::model::{LinearConstraints, QueueState};

/// Row-major table of equally sized vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    dim: usize,
    data: Vec<f64>,
}

impl Series {
    pub fn with_capacity(dim: usize, rows: usize) -> Self {
        Self {
            dim,
            data: Vec::with_capacity(dim * rows),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.dim);
        self.data.extend_from_slice(row);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn last(&self) -> &[f64] {
        self.row(self.len() - 1)
    }
}

/// Full per-slot history of a primal-dual run over `T` slots.
///
/// `gammas` holds `T + 1` rows with row 0 the initial `γ_{-1} = 0`, so
/// [`RunTrace::gamma`] takes the slot index `t ∈ {-1, ..., T-1}`. `queues`
/// holds `Q(0), ..., Q(T)`. Queue rows are empty when `N = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub v: f64,
    pub eta: f64,
    pub states: Vec<usize>,
    pub xs: Series,
    pub gammas: Series,
    pub queues: Vec<QueueState>,
    pub x_bar: Vec<f64>,
    /// Output index in `{-1, ..., T-2}`.
    pub alpha: isize,
    pub gamma_alpha: Vec<f64>,
}

impl RunTrace {
    pub fn horizon(&self) -> usize {
        self.xs.len()
    }

    pub fn dim(&self) -> usize {
        self.xs.dim()
    }

    pub fn gamma(&self, t: isize) -> &[f64] {
        self.gammas.row((t + 1) as usize)
    }

    pub fn x(&self, t: usize) -> &[f64] {
        self.xs.row(t)
    }

    pub fn queue(&self, t: usize) -> &QueueState {
        &self.queues[t]
    }

    pub fn final_queue(&self) -> &QueueState {
        self.queues.last().expect("queues hold Q(0)")
    }

    /// `(1/T) Σ_{t=0}^{T-1} γ_{t-1}`, which is also `E_α[γ_α]` for the
    /// uniform output index.
    pub fn path_mean(&self) -> Vec<f64> {
        let t = self.horizon();
        crate::linalg::mean_rows((0..t).map(|i| self.gammas.row(i)), self.dim())
    }

    /// Largest deviation from `γ_t = (1-η)γ_{t-1} + ηx_t`.
    pub fn recursion_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for t in 0..self.horizon() {
            let prev = self.gammas.row(t);
            let next = self.gammas.row(t + 1);
            let x = self.xs.row(t);
            for j in 0..self.dim() {
                let expect = (1.0 - self.eta) * prev[j] + self.eta * x[j];
                worst = worst.max((next[j] - expect).abs());
            }
        }
        worst
    }

    /// Largest deviation of a replayed queue update from the stored queues.
    pub fn queue_replay_error(&self, c: &LinearConstraints) -> f64 {
        let mut worst = 0.0f64;
        for t in 0..self.horizon() {
            let replay = crate::model::queue_update(&self.queues[t], self.xs.row(t), c);
            worst = worst.max(max_abs_diff(replay.as_slice(), self.queues[t + 1].as_slice()));
        }
        worst
    }

    /// `min_i [Q_i(T) - Σ_t (<a_i, x_t> - b_i)]`; nonnegative up to rounding.
    pub fn queue_lower_bound_slack(&self, c: &LinearConstraints) -> f64 {
        let mut sums = vec![0.0; c.len()];
        let mut r = vec![0.0; c.len()];
        for x in self.xs.rows() {
            c.residuals_into(x, &mut r);
            for (s, ri) in sums.iter_mut().zip(&r) {
                *s += ri;
            }
        }
        self.final_queue()
            .as_slice()
            .iter()
            .zip(&sums)
            .map(|(q, s)| q - s)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest componentwise deviation from
    /// `x̄_T - (1/T) Σ γ_{t-1} = γ_{T-1} / (ηT)`.
    pub fn averaging_identity_error(&self) -> f64 {
        let t = self.horizon() as f64;
        let mean = self.path_mean();
        let last = self.gamma(self.horizon() as isize - 1);
        (0..self.dim())
            .map(|j| ((self.x_bar[j] - mean[j]) - last[j] / (self.eta * t)).abs())
            .fold(0.0, f64::max)
    }

    /// `max_t ||Q(t+1) - Q(t)||`.
    pub fn max_queue_step(&self) -> f64 {
        self.queues
            .windows(2)
            .map(|w| dist(w[0].as_slice(), w[1].as_slice()))
            .fold(0.0, f64::max)
    }

    pub fn min_queue_entry(&self) -> f64 {
        self.queues
            .iter()
            .flat_map(|q| q.as_slice().iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn queue_norms(&self) -> Vec<f64> {
        self.queues.iter().map(QueueState::norm).collect()
    }
}
