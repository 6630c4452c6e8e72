//! Sparse upper-triangular QUBO models over binary variables.
//!
//! A [`Qubo`] stores the coefficients of
//!
//! ```text
//! E(x) = Σ_i q_ii x_i + Σ_{i<j} q_ij x_i x_j
//! ```
//!
//! keyed by `(i, j)` with `i <= j`. Missing keys are zero. Everything in this
//! crate minimizes `E`; builders negate learned weights when they want an
//! interaction to be rewarded.

mod adjacency;
mod enumerate;
mod io;
mod sampleset;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};

pub use adjacency::Adjacency;
pub use enumerate::{
    boltzmann_distribution, for_each_state, ground_states, BoltzmannDistribution, GroundStates,
    MAX_ENUMERATION_VARS,
};
pub use io::{read_qubo, read_sampleset, write_qubo, write_sampleset};
pub use sampleset::{Sample, SampleSet};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Qubo {
    n: usize,
    terms: BTreeMap<(usize, usize), f64>,
}

impl Qubo {
    /// An all-zero model over `n` variables.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a model from `(i, j, value)` triples. Keys may be given in either
    /// order; repeated keys are an error.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut q = Self::new(n);
        for (i, j, value) in terms {
            let key = q.key(i, j)?;
            check_finite(value)?;
            if q.terms.insert(key, value).is_some() {
                return Err(Error::Argument(format!(
                    "duplicate term ({}, {})",
                    key.0, key.1
                )));
            }
        }
        Ok(q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored (non-implicit) coefficients.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    /// Overwrites a coefficient. Setting zero removes the key.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let key = self.key(i, j)?;
        check_finite(value)?;
        if value == 0.0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, value);
        }
        Ok(())
    }

    /// Adds to a coefficient. A sum that cancels to exactly zero removes the key.
    pub fn add_term(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let key = self.key(i, j)?;
        check_finite(value)?;
        if value == 0.0 {
            return Ok(());
        }
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += value;
        if *entry == 0.0 {
            self.terms.remove(&key);
        }
        Ok(())
    }

    /// Iterates stored terms in ascending `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.terms.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn biases(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.terms().filter(|t| t.0 == t.1).map(|(i, _, v)| (i, v))
    }

    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.terms().filter(|t| t.0 < t.1)
    }

    /// Term-wise sum into `self`, growing `n` if `other` is wider.
    pub fn accumulate(&mut self, other: &Qubo) {
        self.n = self.n.max(other.n);
        for (i, j, v) in other.terms() {
            // keys of `other` are valid in the widened model
            self.add_term(i, j, v).expect("validated term");
        }
    }

    /// Relocates every index by `offset` into a model over `n` variables.
    pub fn shifted(&self, offset: usize, n: usize) -> Result<Qubo> {
        if offset + self.n > n {
            return Err(Error::Dimension(format!(
                "cannot place {} variables at offset {offset} in a model of {n}",
                self.n
            )));
        }
        Qubo::from_terms(n, self.terms().map(|(i, j, v)| (i + offset, j + offset, v)))
    }

    pub fn energy(&self, state: &State) -> Result<f64> {
        self.check_len(state.len())?;
        let bits = state.bits();
        Ok(self
            .terms()
            .filter(|&(i, j, _)| bits[i] == 1 && bits[j] == 1)
            .map(|(_, _, v)| v)
            .sum())
    }

    /// Evaluates the quadratic form at a real-valued point. On binary points
    /// this agrees with [`Qubo::energy`]; on clamped real inputs it gives the
    /// conditional energy used to compare free and folded models.
    pub fn energy_at(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(self
            .terms()
            .map(|(i, j, v)| if i == j { v * x[i] } else { v * x[i] * x[j] })
            .sum())
    }

    /// Energy change of setting variable `i` from 0 to 1 with every other
    /// variable held at `x`.
    pub fn field_at(&self, i: usize, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        if i >= self.n {
            return Err(Error::Dimension(format!(
                "variable {i} outside 0..{}",
                self.n
            )));
        }
        Ok(self
            .terms()
            .filter(|&(a, b, _)| a == i || b == i)
            .map(|(a, b, v)| match (a == i, b == i) {
                (true, true) => v,
                (true, false) => v * x[b],
                _ => v * x[a],
            })
            .sum())
    }

    /// Eliminates variables held at fixed real values.
    ///
    /// A term touching one clamped variable becomes a bias on the other; a
    /// term touching only clamped variables becomes part of the returned
    /// constant. Free variables keep their relative order and are renumbered
    /// from zero; the third element maps new indices to old ones.
    pub fn clamp(&self, clamped: &[(usize, f64)]) -> Result<(Qubo, f64, Vec<usize>)> {
        let mut value = vec![None; self.n];
        for &(i, x) in clamped {
            if i >= self.n {
                return Err(Error::Dimension(format!(
                    "clamped variable {i} outside 0..{}",
                    self.n
                )));
            }
            check_finite(x)?;
            value[i] = Some(x);
        }
        let kept: Vec<usize> = (0..self.n).filter(|&i| value[i].is_none()).collect();
        let mut renumber = vec![usize::MAX; self.n];
        for (new, &old) in kept.iter().enumerate() {
            renumber[old] = new;
        }

        let mut folded = Qubo::new(kept.len());
        let mut offset = 0.0;
        for (i, j, v) in self.terms() {
            match (value[i], value[j]) {
                (Some(xi), _) if i == j => offset += v * xi,
                (Some(xi), Some(xj)) => offset += v * xi * xj,
                (Some(xi), None) => folded.add_term(renumber[j], renumber[j], v * xi)?,
                (None, Some(xj)) => folded.add_term(renumber[i], renumber[i], v * xj)?,
                (None, None) => folded.add_term(renumber[i], renumber[j], v)?,
            }
        }
        Ok((folded, offset, kept))
    }

    /// Dense model with every coefficient (biases included) drawn uniformly
    /// from `[-bound, bound]` by a ChaCha8 generator seeded with `seed`.
    pub fn random(n: usize, bound: f64, seed: u64) -> Result<Qubo> {
        use rand::{Rng, SeedableRng};
        check_finite(bound)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut q = Qubo::new(n);
        for i in 0..n {
            for j in i..n {
                q.set(i, j, rng.gen_range(-bound..=bound))?;
            }
        }
        Ok(q)
    }

    /// Largest absolute coefficient, zero for an empty model.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn key(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        let key = if i <= j { (i, j) } else { (j, i) };
        if key.1 >= self.n {
            return Err(Error::Dimension(format!(
                "term ({}, {}) outside a model of {} variables",
                key.0, key.1, self.n
            )));
        }
        Ok(key)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Dimension(format!(
                "state has {len} entries, model has {} variables",
                self.n
            )));
        }
        Ok(())
    }
}

impl Add for &Qubo {
    type Output = Qubo;

    fn add(self, rhs: &Qubo) -> Qubo {
        let mut sum = self.clone();
        sum.accumulate(rhs);
        sum
    }
}

fn check_finite(value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Range(format!("non-finite coefficient {value}")))
    }
}

/// A binary assignment. Ordering is lexicographic on the bit sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct State(Vec<u8>);

impl State {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::Range(format!(
                "bit {pos} is {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Bit `i` of the state is bit `i` of `index`.
    pub fn from_index(index: u64, n: usize) -> Self {
        Self((0..n).map(|i| ((index >> i) & 1) as u8).collect())
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self(bits.iter().map(|&b| u8::from(b)).collect())
    }

    pub fn index(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| f64::from(b)).collect()
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for State {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Range(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(State)
    }
}
