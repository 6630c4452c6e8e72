//! Wall-clock comparison of a classical forward pass against annealing
//! reads on the 358-node model.

use std::fmt;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::build::{assemble_scaled, BuildParams};
use crate::error::{Error, Result};
use crate::nn::ScaledNetwork;
use crate::samplers::{sample_anneal, SamplerConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Annealing reads per timed repetition.
    pub reads: usize,
    pub sweeps: usize,
    /// Timed repetitions; one extra warm-up run is discarded.
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            reads: 100,
            sweeps: 1000,
            repetitions: 30,
            seed: 0,
        }
    }
}

/// Minimum and median of repeated measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub min: Duration,
    pub median: Duration,
}

impl Timing {
    fn from_samples(mut samples: Vec<Duration>) -> Self {
        samples.sort();
        Self {
            min: samples[0],
            median: samples[samples.len() / 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub nodes: usize,
    pub partition: Vec<(String, usize)>,
    pub couplings: usize,
    pub reads: usize,
    pub sweeps: usize,
    pub repetitions: usize,
    /// One classical forward pass.
    pub forward: Timing,
    /// One annealing read (a repetition's time divided by its reads).
    pub per_read: Timing,
}

impl BenchReport {
    /// Median annealing read time over median forward-pass time.
    pub fn ratio(&self) -> f64 {
        self.per_read.median.as_secs_f64() / self.forward.median.as_secs_f64()
    }
}

fn micros(d: Duration) -> f64 {
    d.as_secs_f64() * 1e6
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .partition
            .iter()
            .map(|(r, n)| format!("{r} {n}"))
            .collect();
        writeln!(
            f,
            "model: {} nodes ({}), {} couplings",
            self.nodes,
            parts.join(", "),
            self.couplings
        )?;
        writeln!(
            f,
            "repetitions: {} timed after 1 warm-up; annealing {} reads x {} sweeps",
            self.repetitions, self.reads, self.sweeps
        )?;
        writeln!(
            f,
            "classical forward pass: min {:.3} us, median {:.3} us",
            micros(self.forward.min),
            micros(self.forward.median)
        )?;
        writeln!(
            f,
            "simulated annealing per read: min {:.3} us, median {:.3} us",
            micros(self.per_read.min),
            micros(self.per_read.median)
        )?;
        writeln!(
            f,
            "ratio (anneal read / forward pass, medians): {:.1}",
            self.ratio()
        )?;
        write!(
            f,
            "note: both figures are classical CPU timings; no quantum annealer timing is reproduced"
        )
    }
}

/// A deterministic grey-level test image for the scaled network.
pub fn bench_image(seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (h, w) = ScaledNetwork::INPUT;
    Array2::from_shape_simple_fn((h, w), || rng.gen::<f64>())
}

pub fn run(config: &BenchConfig) -> Result<BenchReport> {
    if config.repetitions == 0 {
        return Err(Error::Argument("repetitions must be at least 1".into()));
    }
    let sampler = SamplerConfig {
        reads: config.reads,
        sweeps: config.sweeps,
        seed: config.seed,
        ..Default::default()
    };
    sampler.validate()?;
    let net = ScaledNetwork::random(config.seed);
    let image = bench_image(config.seed);
    let built = assemble_scaled(&net, &image, &BuildParams::default())?;

    let mut forward = Vec::with_capacity(config.repetitions);
    let mut per_read = Vec::with_capacity(config.repetitions);
    for rep in 0..=config.repetitions {
        let start = Instant::now();
        std::hint::black_box(net.forward(std::hint::black_box(&image))?);
        let f = start.elapsed();

        let start = Instant::now();
        std::hint::black_box(sample_anneal(&built.qubo, &sampler)?);
        let a = start.elapsed() / config.reads as u32;
        if rep > 0 {
            forward.push(f);
            per_read.push(a);
        }
    }
    Ok(BenchReport {
        nodes: built.qubo.n(),
        partition: built
            .layout
            .segments()
            .iter()
            .map(|s| (s.role.to_string(), s.range.len()))
            .collect(),
        couplings: built.qubo.couplings().count(),
        reads: config.reads,
        sweeps: config.sweeps,
        repetitions: config.repetitions,
        forward: Timing::from_samples(forward),
        per_read: Timing::from_samples(per_read),
    })
}
