//! Exhaustive enumeration over all `2^n` states.
//!
//! States are visited in Gray-code order so each step flips one bit and the
//! energy is updated from that variable's neighbours. The running energy is
//! recomputed from scratch every [`RESYNC_INTERVAL`] steps to bound drift.

use super::{Adjacency, Qubo, State};
use crate::error::{Error, Result};

/// Largest model the exact operations accept.
pub const MAX_ENUMERATION_VARS: usize = 24;

const RESYNC_INTERVAL: u64 = 4096;

/// Calls `visit(index, x, energy)` for every state, where `x` holds the bits
/// as 0.0/1.0 and `index` encodes bit `i` as bit `i` of the integer.
pub fn for_each_state<F>(q: &Qubo, mut visit: F) -> Result<()>
where
    F: FnMut(u64, &[f64], f64),
{
    let n = q.n();
    if n > MAX_ENUMERATION_VARS {
        return Err(Error::Capacity {
            n,
            max: MAX_ENUMERATION_VARS,
        });
    }
    let adj = Adjacency::new(q);
    let mut x = vec![0.0; n];
    let mut index = 0u64;
    let mut energy = 0.0;
    visit(index, &x, energy);
    for step in 1..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        if x[bit] == 0.0 {
            energy += adj.field(bit, &x);
            x[bit] = 1.0;
        } else {
            x[bit] = 0.0;
            energy -= adj.field(bit, &x);
        }
        index ^= 1 << bit;
        if step % RESYNC_INTERVAL == 0 {
            energy = q.energy_at(&x)?;
        }
        visit(index, &x, energy);
    }
    Ok(())
}

/// The exact Boltzmann distribution `p(x) = exp(-β E(x)) / Z`.
#[derive(Debug, Clone)]
pub struct BoltzmannDistribution {
    n: usize,
    beta: f64,
    probabilities: Vec<f64>,
    log_partition: f64,
}

impl BoltzmannDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ln Z`.
    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    pub fn probability(&self, state: &State) -> f64 {
        assert_eq!(
            state.len(),
            self.n,
            "state width differs from the distribution"
        );
        self.probabilities[state.index() as usize]
    }

    /// Probabilities indexed by [`State::index`].
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn iter(&self) -> impl Iterator<Item = (State, f64)> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(idx, &p)| (State::from_index(idx as u64, self.n), p))
    }

    /// Total-variation distance to an empirical distribution given as
    /// `(state, count)` pairs.
    pub fn total_variation<'a, I>(&self, counts: I) -> f64
    where
        I: IntoIterator<Item = (&'a State, usize)>,
    {
        let mut empirical = vec![0.0; self.probabilities.len()];
        let mut total = 0usize;
        for (state, count) in counts {
            empirical[state.index() as usize] += count as f64;
            total += count;
        }
        let total = total as f64;
        0.5 * empirical
            .iter()
            .zip(&self.probabilities)
            .map(|(&c, &p)| (c / total - p).abs())
            .sum::<f64>()
    }
}

pub fn boltzmann_distribution(q: &Qubo, beta: f64) -> Result<BoltzmannDistribution> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Argument(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    let n = q.n();
    if n > MAX_ENUMERATION_VARS {
        return Err(Error::Capacity {
            n,
            max: MAX_ENUMERATION_VARS,
        });
    }
    let mut energies = vec![0.0; 1usize << n];
    for_each_state(q, |idx, _, e| energies[idx as usize] = e)?;
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let mut probabilities: Vec<f64> = energies
        .iter()
        .map(|&e| (-beta * (e - min)).exp())
        .collect();
    let z: f64 = probabilities.iter().sum();
    for p in &mut probabilities {
        *p /= z;
    }
    Ok(BoltzmannDistribution {
        n,
        beta,
        probabilities,
        log_partition: z.ln() - beta * min,
    })
}

/// Minimum energy and every state attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStates {
    pub energy: f64,
    pub states: Vec<State>,
}

/// Exhaustive minimization. Candidate energies from the incremental sweep
/// are re-evaluated term by term before the minimum is taken, so the
/// reported energy is exactly what [`Qubo::energy`] returns.
pub fn ground_states(q: &Qubo) -> Result<GroundStates> {
    let n = q.n();
    let slack = 1e-9 * (1.0 + q.max_abs() * (n as f64 + 1.0).powi(2));
    let mut best = f64::INFINITY;
    let mut candidates: Vec<u64> = Vec::new();
    for_each_state(q, |idx, _, e| {
        if e < best - slack {
            best = e;
            candidates.clear();
        } else {
            best = best.min(e);
        }
        if e <= best + slack {
            candidates.push(idx);
        }
    })?;

    let mut exact: Vec<(f64, State)> = candidates
        .into_iter()
        .map(|idx| {
            let s = State::from_index(idx, n);
            (q.energy(&s).expect("width matches"), s)
        })
        .collect();
    let energy = exact.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    exact.retain(|e| e.0 == energy);
    let mut states: Vec<State> = exact.into_iter().map(|e| e.1).collect();
    states.sort();
    Ok(GroundStates { energy, states })
}
