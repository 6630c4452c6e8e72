use rand::RngCore;

use super::{random_starts, run_reads, to_state, SamplerConfig};
use crate::error::Result;
use crate::qubo::{Adjacency, Qubo, SampleSet, State};

/// Models up to this size use a precomputed table of conditional
/// probabilities (`n · 2^n` entries) instead of evaluating the field and the
/// logistic function at every update.
const TABLE_MAX_VARS: usize = 12;

/// Single-site heat-bath sampling at the fixed inverse temperature `beta_end`.
///
/// Each read starts from a uniform random state and performs `sweeps` passes
/// over the variables in index order. Variable `i` is set to 1 with
/// probability `σ(-β ΔE_i)`, where `ΔE_i` is the energy change of switching
/// it on given the current values of its neighbours.
pub fn sample_gibbs(q: &Qubo, config: &SamplerConfig) -> Result<SampleSet> {
    config.validate()?;
    let adj = Adjacency::new(q);
    let beta = config.beta_end;
    let states = if q.n() <= TABLE_MAX_VARS {
        tabulated(&adj, beta, config)?
    } else {
        direct(&adj, beta, config)?
    };
    SampleSet::from_states(q, states)
}

/// `σ(-β ΔE_i)` as a threshold for a uniform 32-bit draw: the site turns on
/// when the draw is below it. Quantizing to 2^-32 keeps the exact endpoints
/// (0 never, 1 always) and halves the random bits used per update.
#[inline]
fn on_threshold(adj: &Adjacency, i: usize, x: &[f64], beta: f64) -> u64 {
    let p = 1.0 / (1.0 + (beta * adj.field(i, x)).exp());
    (p * 4_294_967_296.0) as u64
}

fn direct(adj: &Adjacency, beta: f64, config: &SamplerConfig) -> Result<Vec<State>> {
    let n = adj.n();
    run_reads(config, |rngs| {
        let mut xs = random_starts(n, rngs);
        for _ in 0..config.sweeps {
            for i in 0..n {
                for (x, rng) in xs.iter_mut().zip(rngs.iter_mut()) {
                    let t = on_threshold(adj, i, x, beta);
                    x[i] = if u64::from(rng.next_u32()) < t {
                        1.0
                    } else {
                        0.0
                    };
                }
            }
        }
        xs.iter().map(|x| to_state(x)).collect()
    })
}

/// Same chain as [`direct`], with `on_threshold` looked up by (site, state with that
/// site cleared). Table entries come from the same expression, so both paths
/// produce identical samples.
fn tabulated(adj: &Adjacency, beta: f64, config: &SamplerConfig) -> Result<Vec<State>> {
    let n = adj.n();
    let states = 1usize << n;
    let mut table = vec![0u64; n * states];
    let mut x = vec![0.0; n];
    for mask in 0..states {
        for (b, xb) in x.iter_mut().enumerate() {
            *xb = ((mask >> b) & 1) as f64;
        }
        for i in (0..n).filter(|&i| mask & (1 << i) == 0) {
            table[i * states + mask] = on_threshold(adj, i, &x, beta);
        }
    }

    run_reads(config, |rngs| {
        let mut masks: Vec<usize> = random_starts(n, rngs)
            .iter()
            .map(|x| {
                x.iter()
                    .enumerate()
                    .fold(0, |m, (b, &v)| m | (usize::from(v == 1.0) << b))
            })
            .collect();
        for _ in 0..config.sweeps {
            for i in 0..n {
                let row = &table[i * states..(i + 1) * states];
                for (mask, rng) in masks.iter_mut().zip(rngs.iter_mut()) {
                    let cleared = *mask & !(1 << i);
                    let on = u64::from(rng.next_u32()) < row[cleared];
                    *mask = cleared | (usize::from(on) << i);
                }
            }
        }
        masks
            .iter()
            .map(|&m| State::from_index(m as u64, n))
            .collect()
    })
}
