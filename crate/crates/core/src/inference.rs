//! Reading classes out of sample sets: consensus over the lowest-energy
//! reads, prediction, and confusion tables.

use std::fmt::Write as _;

use crate::build::{assemble, BuildParams, ModelLayout};
use crate::error::{Error, Result};
use crate::nn::{argmax, forward, LabeledImage, NetworkWeights};
use crate::qubo::SampleSet;
use crate::samplers::{Backend, Sampler, SamplerConfig};

/// Mean activation of each class node over the retained samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    pub per_class: Vec<f64>,
    pub retained: usize,
    pub total_reads: usize,
}

impl ClassScores {
    /// Scores ×100, rounded half up.
    pub fn percent(&self) -> Vec<u32> {
        self.per_class.iter().map(|&s| percent(s)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, s) in self.per_class.iter().enumerate() {
            writeln!(out, "class {k} {s:.6} {}", percent(*s)).unwrap();
        }
        out
    }
}

fn percent(score: f64) -> u32 {
    (score * 100.0 + 0.5).floor() as u32
}

/// Averages the class bits of the `k` lowest-energy reads. Reads are taken
/// in the sample set's order, lowest energy first and equal energies in
/// ascending state order.
pub fn consensus(samples: &SampleSet, layout: &ModelLayout, k: usize) -> Result<ClassScores> {
    if k == 0 || k > samples.reads() {
        return Err(Error::Argument(format!(
            "cannot retain {k} of {} reads",
            samples.reads()
        )));
    }
    if samples.n() != layout.n() {
        return Err(Error::Dimension(format!(
            "{}-bit samples for a {}-node layout",
            samples.n(),
            layout.n()
        )));
    }
    let classes = layout.classes();
    let mut totals = vec![0usize; classes.len()];
    let mut left = k;
    for sample in samples.samples() {
        let take = sample.occurrences.min(left);
        for (t, &bit) in totals.iter_mut().zip(&sample.state.bits()[classes.clone()]) {
            *t += take * usize::from(bit);
        }
        left -= take;
        if left == 0 {
            break;
        }
    }
    Ok(ClassScores {
        per_class: totals.iter().map(|&t| t as f64 / k as f64).collect(),
        retained: k,
        total_reads: samples.reads(),
    })
}

/// Highest-scoring class, lowest index on ties.
pub fn predict(scores: &ClassScores) -> usize {
    argmax(&scores.per_class)
}

/// One row of consensus scores per input, columns per class.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionTable {
    pub labels: Vec<usize>,
    pub rows: Vec<ClassScores>,
}

impl ConfusionTable {
    pub fn num_classes(&self) -> usize {
        self.rows.first().map_or(0, |r| r.per_class.len())
    }

    /// Rows whose highest score is on the true label.
    pub fn diagonal_hits(&self) -> usize {
        self.labels
            .iter()
            .zip(&self.rows)
            .filter(|(&l, r)| predict(r) == l)
            .count()
    }

    pub fn to_text(&self) -> String {
        let classes = self.num_classes();
        let mut out = String::from("input |");
        for k in 0..classes {
            write!(out, " {k:>4}").unwrap();
        }
        out.push_str(" | predicted\n");
        out.push_str(&"-".repeat(6 + 5 * classes + 13));
        out.push('\n');
        for (label, row) in self.labels.iter().zip(&self.rows) {
            write!(out, "{label:>5} |").unwrap();
            for v in row.percent() {
                write!(out, " {v:>4}").unwrap();
            }
            writeln!(out, " | {}", predict(row)).unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("input");
        for k in 0..self.num_classes() {
            write!(out, ",{k}").unwrap();
        }
        out.push_str(",predicted\n");
        for (label, row) in self.labels.iter().zip(&self.rows) {
            write!(out, "{label}").unwrap();
            for v in row.percent() {
                write!(out, ",{v}").unwrap();
            }
            writeln!(out, ",{}", predict(row)).unwrap();
        }
        out
    }
}

/// Everything needed to classify one input.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub backend: Backend,
    pub sampler: SamplerConfig,
    pub build: BuildParams,
    /// Lowest-energy reads retained for the consensus.
    pub k: usize,
    /// Lower `beta_start` to suit each model's energy scale; see
    /// [`SamplerConfig::with_hot_start`].
    pub hot_start: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Anneal,
            sampler: SamplerConfig::default(),
            build: BuildParams::default(),
            k: 100,
            hot_start: false,
        }
    }
}

/// Builds, samples and scores one feature vector.
pub fn classify_features(
    features: &[f64],
    weights: &NetworkWeights,
    config: &PipelineConfig,
) -> Result<ClassScores> {
    if config.k > config.sampler.reads {
        return Err(Error::Argument(format!(
            "k = {} exceeds {} reads",
            config.k, config.sampler.reads
        )));
    }
    let built = assemble(features, weights, &config.build)?;
    let sampler = if config.hot_start {
        config.sampler.with_hot_start(&built.qubo)
    } else {
        config.sampler.clone()
    };
    let samples = config.backend.sample(&built.qubo, &sampler)?;
    consensus(&samples, &built.layout, config.k)
}

/// The conv activations of `image` that the QUBO consumes.
pub fn image_features(weights: &NetworkWeights, image: &LabeledImage) -> Result<Vec<f64>> {
    Ok(forward(weights, image)?.features)
}

/// Classifies each `(label, features)` input with the same configuration.
pub fn confusion(
    inputs: &[(usize, Vec<f64>)],
    weights: &NetworkWeights,
    config: &PipelineConfig,
) -> Result<ConfusionTable> {
    let mut table = ConfusionTable {
        labels: Vec::with_capacity(inputs.len()),
        rows: Vec::with_capacity(inputs.len()),
    };
    for (label, features) in inputs {
        table.labels.push(*label);
        table
            .rows
            .push(classify_features(features, weights, config)?);
    }
    Ok(table)
}
