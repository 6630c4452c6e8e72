use rand::Rng;

use super::{run_reads, SamplerConfig};
use crate::error::Result;
use crate::qubo::{boltzmann_distribution, Qubo, SampleSet, State};

/// Independent draws from the exact Boltzmann distribution at `beta_end`.
///
/// Inverse-CDF sampling over all `2^n` states; limited to
/// [`MAX_ENUMERATION_VARS`](crate::qubo::MAX_ENUMERATION_VARS) variables.
pub fn sample_exact(q: &Qubo, config: &SamplerConfig) -> Result<SampleSet> {
    config.validate()?;
    let dist = boltzmann_distribution(q, config.beta_end)?;
    let mut cdf = Vec::with_capacity(dist.probabilities().len());
    let mut acc = 0.0;
    for &p in dist.probabilities() {
        acc += p;
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    let n = q.n();
    let states = run_reads(config, |rngs| {
        rngs.iter_mut()
            .map(|rng| {
                let u: f64 = rng.gen::<f64>() * acc;
                let idx = cdf.partition_point(|&c| c <= u).min(last);
                State::from_index(idx as u64, n)
            })
            .collect()
    })?;
    SampleSet::from_states(q, states)
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn single_free_variable_is_fair() {
        let config = SamplerConfig::fixed_beta(1.0, 10_000, 1, 7);
        let set = sample_exact(&Qubo::new(1), &config).unwrap();
        let ones: usize = set
            .counts()
            .filter(|(s, _)| s.get(0) == 1)
            .map(|(_, c)| c)
            .sum();
        let p = ones as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&p), "p(1) = {p}");
    }

    #[test]
    fn one_hot_pair_concentrates_on_one_hot_states() {
        // weights e^5, e^5, 1, 1: p(one-hot) = 2e^5 / (2e^5 + 2) ≈ 0.9933
        let config = SamplerConfig::fixed_beta(5.0, 10_000, 1, 3);
        let set = sample_exact(&one_hot_pair(), &config).unwrap();
        let one_hot: usize = set
            .counts()
            .filter(|(s, _)| s.count_ones() == 1)
            .map(|(_, c)| c)
            .sum();
        assert!(one_hot as f64 / 10_000.0 >= 0.85);
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let q = random_qubo(5, 1);
        let config = SamplerConfig::fixed_beta(1.0, 500, 1, 42);
        assert_eq!(
            sample_exact(&q, &config).unwrap(),
            sample_exact(&q, &config).unwrap()
        );
    }

    #[test]
    fn empirical_distribution_converges() {
        let q = random_qubo(4, 8);
        let config = SamplerConfig::fixed_beta(1.0, 100_000, 1, 5);
        let set = sample_exact(&q, &config).unwrap();
        let dist = boltzmann_distribution(&q, 1.0).unwrap();
        assert!(dist.total_variation(set.counts()) < 0.01);
    }
}
