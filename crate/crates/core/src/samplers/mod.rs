//! Classical samplers standing in for a quantum annealer.
//!
//! Every sampler draws `reads` independent states and returns them as an
//! energy-sorted [`SampleSet`]. Read `r` draws its randomness from a
//! ChaCha8 stream keyed by `(seed, r)`, so the output does not depend on how
//! reads are scheduled across threads.
//!
//! The generator is `rand_chacha::ChaCha8Rng` (rand_chacha 0.3, rand 0.8),
//! which produces the same stream on every platform.

mod anneal;
mod exact;
mod gibbs;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qubo::{Adjacency, Qubo, SampleSet, State};

pub use anneal::sample_anneal;
pub use exact::sample_exact;
pub use gibbs::sample_gibbs;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub reads: usize,
    /// Full passes over all variables per read (Gibbs and annealing).
    pub sweeps: usize,
    /// Inverse temperature at the first annealing sweep.
    pub beta_start: f64,
    /// Inverse temperature at the last annealing sweep; the fixed inverse
    /// temperature for the exact and Gibbs samplers.
    pub beta_end: f64,
    pub seed: u64,
    /// Worker threads for independent reads. Output is identical for any value.
    pub threads: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            reads: 1000,
            sweeps: 1000,
            beta_start: 0.1,
            beta_end: 5.0,
            seed: 0,
            threads: 1,
        }
    }
}

impl SamplerConfig {
    /// A configuration sampling at one fixed inverse temperature.
    pub fn fixed_beta(beta: f64, reads: usize, sweeps: usize, seed: u64) -> Self {
        Self {
            reads,
            sweeps,
            beta_start: beta,
            beta_end: beta,
            seed,
            threads: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reads == 0 {
            return Err(Error::Argument("reads must be at least 1".into()));
        }
        if self.sweeps == 0 {
            return Err(Error::Argument("sweeps must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Argument("threads must be at least 1".into()));
        }
        let ok = self.beta_start > 0.0
            && self.beta_start.is_finite()
            && self.beta_end.is_finite()
            && self.beta_end >= self.beta_start;
        if !ok {
            return Err(Error::Argument(format!(
                "need 0 < beta_start <= beta_end, got {} and {}",
                self.beta_start, self.beta_end
            )));
        }
        Ok(())
    }
}

impl SamplerConfig {
    /// This configuration with `beta_start` lowered so that the largest
    /// possible single-flip energy change of `q` is accepted with
    /// probability 1/2 at the first sweep. Never raises `beta_start`, and a
    /// model without coefficients is left unchanged.
    pub fn with_hot_start(&self, q: &Qubo) -> SamplerConfig {
        let max_flip = Adjacency::new(q).max_flip();
        let mut config = self.clone();
        if max_flip > 0.0 {
            config.beta_start = config.beta_start.min(std::f64::consts::LN_2 / max_flip);
        }
        config
    }
}

pub trait Sampler {
    fn sample(&self, q: &Qubo, config: &SamplerConfig) -> Result<SampleSet>;
}

/// Built-in sampler backends, selected by name.
///
/// Names other than `exact`, `gibbs` and `anneal` are reserved for remote
/// hardware backends and currently rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Gibbs,
    Anneal,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Gibbs => "gibbs",
            Backend::Anneal => "anneal",
        }
    }
}

impl Sampler for Backend {
    fn sample(&self, q: &Qubo, config: &SamplerConfig) -> Result<SampleSet> {
        match self {
            Backend::Exact => sample_exact(q, config),
            Backend::Gibbs => sample_gibbs(q, config),
            Backend::Anneal => sample_anneal(q, config),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "gibbs" => Ok(Backend::Gibbs),
            "anneal" => Ok(Backend::Anneal),
            other => Err(Error::Argument(format!(
                "unknown sampler backend {other:?} (available: exact, gibbs, anneal)"
            ))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn read_rng(seed: u64, read: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(read as u64);
    rng
}

/// Reads advanced together by one kernel call. Interleaving independent
/// chains hides the latency of each single-site update.
pub(crate) const LANES: usize = 4;

/// Runs `batch` over consecutive groups of up to [`LANES`] reads, handing it
/// one generator per read, and collects the states in read order.
pub(crate) fn run_reads<F>(config: &SamplerConfig, batch: F) -> Result<Vec<State>>
where
    F: Fn(&mut [ChaCha8Rng]) -> Vec<State> + Sync,
{
    let run = |chunk: usize| {
        let first = chunk * LANES;
        let last = (first + LANES).min(config.reads);
        let mut rngs: Vec<ChaCha8Rng> = (first..last).map(|r| read_rng(config.seed, r)).collect();
        batch(&mut rngs)
    };
    let chunks = config.reads.div_ceil(LANES);
    let nested: Vec<Vec<State>> = if config.threads <= 1 {
        (0..chunks).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::Argument(format!("cannot start sampler threads: {e}")))?;
        pool.install(|| (0..chunks).into_par_iter().map(run).collect())
    };
    Ok(nested.into_iter().flatten().collect())
}

pub(crate) fn random_start<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 })
        .collect()
}

pub(crate) fn to_state(x: &[f64]) -> State {
    State::new(x.iter().map(|&v| u8::from(v == 1.0)).collect()).expect("binary")
}

/// One uniform random starting state per generator, as 0.0/1.0 values.
pub(crate) fn random_starts(n: usize, rngs: &mut [ChaCha8Rng]) -> Vec<Vec<f64>> {
    rngs.iter_mut().map(|rng| random_start(n, rng)).collect()
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::qubo::Qubo;

    /// Dense model with every coefficient uniform in [-2, 2].
    pub fn random_qubo(n: usize, seed: u64) -> Qubo {
        Qubo::random(n, 2.0, seed).unwrap()
    }

    pub fn one_hot_pair() -> Qubo {
        Qubo::from_terms(2, [(0, 0, -1.0), (1, 1, -1.0), (0, 1, 2.0)]).unwrap()
    }
}
