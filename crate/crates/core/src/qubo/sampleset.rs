use std::collections::HashMap;

use super::{Qubo, State};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub state: State,
    pub energy: f64,
    pub occurrences: usize,
}

/// Distinct states with multiplicities, sorted by ascending energy and then
/// by lexicographic state order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    n: usize,
    samples: Vec<Sample>,
}

impl SampleSet {
    /// Aggregates raw reads. Energies are recomputed from `q`.
    pub fn from_states<I>(q: &Qubo, states: I) -> Result<Self>
    where
        I: IntoIterator<Item = State>,
    {
        let mut counts: HashMap<State, usize> = HashMap::new();
        for s in states {
            *counts.entry(s).or_default() += 1;
        }
        let samples = counts
            .into_iter()
            .map(|(state, occurrences)| {
                Ok(Sample {
                    energy: q.energy(&state)?,
                    state,
                    occurrences,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_samples(q.n(), samples))
    }

    /// Sorts and checks widths; duplicate states are merged.
    pub(crate) fn from_samples(n: usize, mut samples: Vec<Sample>) -> Self {
        samples.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.state.cmp(&b.state))
        });
        samples.dedup_by(|later, earlier| {
            if later.state == earlier.state {
                earlier.occurrences += later.occurrences;
                true
            } else {
                false
            }
        });
        Self { n, samples }
    }

    pub(crate) fn from_sorted(n: usize, samples: Vec<Sample>) -> Result<Self> {
        for w in samples.windows(2) {
            if w[1].energy < w[0].energy {
                return Err(Error::Argument("samples are not sorted by energy".into()));
            }
        }
        Ok(Self::from_samples(n, samples))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total reads, counting multiplicity.
    pub fn reads(&self) -> usize {
        self.samples.iter().map(|s| s.occurrences).sum()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn lowest(&self) -> Option<&Sample> {
        self.samples.first()
    }

    /// One entry per read, lowest energy first.
    pub fn expanded(&self) -> impl Iterator<Item = &Sample> + '_ {
        self.samples
            .iter()
            .flat_map(|s| std::iter::repeat_n(s, s.occurrences))
    }

    pub fn counts(&self) -> impl Iterator<Item = (&State, usize)> + '_ {
        self.samples.iter().map(|s| (&s.state, s.occurrences))
    }

    /// Sample set in which every read occurs `factor` times.
    pub fn replicated(&self, factor: usize) -> SampleSet {
        let samples = self
            .samples
            .iter()
            .map(|s| Sample {
                occurrences: s.occurrences * factor,
                ..s.clone()
            })
            .collect();
        SampleSet { n: self.n, samples }
    }
}
