use rand::Rng;

use super::{random_starts, run_reads, to_state, SamplerConfig};
use crate::error::Result;
use crate::qubo::{Adjacency, Qubo, SampleSet};

/// Simulated annealing with single-flip Metropolis updates.
///
/// Sweep `k` of `S` runs at `β_k = β_start · (β_end / β_start)^(k / (S - 1))`;
/// a single sweep runs at `β_end`. Sites are visited in index order.
pub fn sample_anneal(q: &Qubo, config: &SamplerConfig) -> Result<SampleSet> {
    config.validate()?;
    let adj = Adjacency::new(q);
    let n = q.n();
    let schedule = beta_schedule(config);
    let states = run_reads(config, |rngs| {
        let mut xs = random_starts(n, rngs);
        for &beta in &schedule {
            for i in 0..n {
                for (x, rng) in xs.iter_mut().zip(rngs.iter_mut()) {
                    let field = adj.field(i, x);
                    let delta = if x[i] == 0.0 { field } else { -field };
                    if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                        x[i] = 1.0 - x[i];
                    }
                }
            }
        }
        xs.iter().map(|x| to_state(x)).collect()
    })?;
    SampleSet::from_states(q, states)
}

fn beta_schedule(config: &SamplerConfig) -> Vec<f64> {
    let sweeps = config.sweeps;
    if sweeps == 1 {
        return vec![config.beta_end];
    }
    let ratio = config.beta_end / config.beta_start;
    (0..sweeps)
        .map(|k| config.beta_start * ratio.powf(k as f64 / (sweeps - 1) as f64))
        .collect()
}
