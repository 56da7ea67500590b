use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Independent RNG streams derived from one seed. Keeping them apart means a
/// change in horizon (which changes how many α draws happen) never shifts the
/// state sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RngStream {
    States = 0,
    Alpha = 1,
    TrackingStates = 2,
    Generator = 3,
}

/// ChaCha8 keyed by `seed`, on the given stream. ChaCha output is
/// platform-independent, so every sequence derived from it is too.
pub fn rng_stream(seed: u64, stream: RngStream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Uniform in [0, 1): the top 53 bits of one 64-bit draw scaled by 2^-53.
#[inline]
pub fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in `0..n` via `floor(u * n)`.
#[inline]
pub fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    let k = (uniform01(rng) * n as f64) as usize;
    k.min(n.saturating_sub(1))
}

/// Finite i.i.d. state process: a label and a probability per state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateModel {
    labels: Vec<String>,
    probabilities: Vec<f64>,
    cumulative: Vec<f64>,
}

impl StateModel {
    pub fn new(labels: Vec<String>, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidInstance("state model has no states".into()));
        }
        if labels.len() != probabilities.len() {
            return Err(Error::InvalidInstance(format!(
                "{} state labels for {} probabilities",
                labels.len(),
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidInstance(
                "state probabilities must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInstance(format!(
                "state probabilities sum to {total}, not 1"
            )));
        }
        let mut cumulative = Vec::with_capacity(probabilities.len());
        let mut acc = 0.0;
        for p in &probabilities {
            acc += p;
            cumulative.push(acc);
        }
        Ok(Self {
            labels,
            probabilities,
            cumulative,
        })
    }

    pub fn from_probabilities(probabilities: Vec<f64>) -> Result<Self> {
        let labels = (0..probabilities.len()).map(|i| format!("s{i}")).collect();
        Self::new(labels, probabilities)
    }

    /// One state with probability 1.
    pub fn deterministic() -> Self {
        Self::new(vec!["s0".into()], vec![1.0]).expect("single state is valid")
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Inverse CDF: the first state whose cumulative probability exceeds `u`.
    /// Rounding in the last partial sum falls back to the last state with
    /// positive mass.
    pub fn index_for(&self, u: f64) -> usize {
        match self.cumulative.iter().position(|&c| u < c) {
            Some(k) => k,
            None => self
                .probabilities
                .iter()
                .rposition(|&p| p > 0.0)
                .unwrap_or(self.len() - 1),
        }
    }

    pub fn sampler(&self, seed: u64, stream: RngStream) -> StateSampler {
        StateSampler {
            rng: rng_stream(seed, stream),
            model: self.clone(),
        }
    }
}

pub struct StateSampler {
    rng: ChaCha8Rng,
    model: StateModel,
}

impl StateSampler {
    pub fn next_state(&mut self) -> usize {
        let u = uniform01(&mut self.rng);
        self.model.index_for(u)
    }
}

impl Iterator for StateSampler {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        Some(self.next_state())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_probabilities() {
        assert!(StateModel::from_probabilities(vec![0.5, 0.4]).is_err());
        assert!(StateModel::from_probabilities(vec![-0.1, 1.1]).is_err());
        assert!(StateModel::from_probabilities(vec![]).is_err());
        assert!(StateModel::from_probabilities(vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn sampler_is_reproducible() {
        let m = StateModel::from_probabilities(vec![0.2, 0.3, 0.5]).unwrap();
        let a: Vec<_> = m.sampler(7, RngStream::States).take(500).collect();
        let b: Vec<_> = m.sampler(7, RngStream::States).take(500).collect();
        let c: Vec<_> = m.sampler(8, RngStream::States).take(500).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn streams_are_independent() {
        let m = StateModel::from_probabilities(vec![0.5, 0.5]).unwrap();
        let a: Vec<_> = m.sampler(1, RngStream::States).take(64).collect();
        let b: Vec<_> = m.sampler(1, RngStream::TrackingStates).take(64).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn empirical_frequencies_match() {
        let m = StateModel::from_probabilities(vec![0.1, 0.6, 0.3]).unwrap();
        let n = 200_000;
        let mut counts = [0usize; 3];
        for s in m.sampler(3, RngStream::States).take(n) {
            counts[s] += 1;
        }
        for (c, p) in counts.iter().zip(m.probabilities()) {
            let freq = *c as f64 / n as f64;
            assert!((freq - p).abs() < 0.01, "freq {freq} vs {p}");
        }
    }

    #[test]
    fn inverse_cdf_edges() {
        let m = StateModel::from_probabilities(vec![0.0, 0.5, 0.5]).unwrap();
        assert_eq!(m.index_for(0.0), 1);
        assert_eq!(m.index_for(0.4999), 1);
        assert_eq!(m.index_for(0.5), 2);
        assert_eq!(m.index_for(1.0), 2);
    }
}
