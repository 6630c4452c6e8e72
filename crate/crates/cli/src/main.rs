mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{BetaStart, TableFormat};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] annealnet::Error),
}

impl CliError {
    /// 1 usage, 2 bad input data, 3 runtime failure.
    fn exit_code(&self) -> u8 {
        use annealnet::Error as E;
        match self {
            CliError::Usage(_) | CliError::Core(E::Argument(_)) => 1,
            CliError::Core(E::Parse { .. } | E::Io { .. } | E::Dimension(_) | E::Range(_)) => 2,
            CliError::Core(E::TrainingFailed { .. } | E::Capacity { .. }) => 3,
        }
    }
}

/// Train a small CNN, turn it into a QUBO model and classify by sampling
/// low-energy states.
#[derive(Debug, Parser)]
#[command(name = "annealnet", version)]
struct Cli {
    /// key=value settings file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train the CNN on a glyph file and write its weights.
    Train(TrainArgs),
    /// Build the QUBO model for one input and write it with its layout.
    BuildQubo(BuildQuboArgs),
    /// Sample a QUBO file and write the sample set.
    Sample(SampleArgs),
    /// Classify every input and print the consensus table.
    Classify(ClassifyArgs),
    /// Time a classical forward pass against annealing reads on the
    /// 358-node model.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Glyph file (default: the bundled five-digit fixture).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Where to write the weights.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    init_scale: Option<f64>,
    /// Weight initialisation seed (config key `train_seed`).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Glyph file; features come from the network's conv layer.
    #[arg(long, conflicts_with = "features")]
    data: Option<PathBuf>,
    /// Feature file (`features n=.. classes=..`) for dense-only weights.
    #[arg(long)]
    features: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// One-hot penalty (default: 1 + largest column sum of |W|).
    #[arg(long)]
    penalty: Option<f64>,
    /// `free` or `folded`.
    #[arg(long)]
    clamp_mode: Option<String>,
    /// `minmax` or `maxabs`.
    #[arg(long)]
    normalization: Option<String>,
}

#[derive(Debug, Args)]
struct SamplerArgs {
    /// `exact`, `gibbs` or `anneal`.
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    reads: Option<usize>,
    #[arg(long)]
    sweeps: Option<usize>,
    /// A number, or `auto` to scale to each model's largest flip.
    #[arg(long)]
    beta_start: Option<BetaStart>,
    #[arg(long)]
    beta_end: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct BuildQuboArgs {
    #[arg(long)]
    weights: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    /// Which input of the file to build (0-based).
    #[arg(long)]
    index: Option<usize>,
    /// QUBO output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Layout sidecar path (default: `<out>.layout`).
    #[arg(long)]
    layout: Option<PathBuf>,
    #[command(flatten)]
    build: BuildArgs,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    qubo: Option<PathBuf>,
    /// Sample-set output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    weights: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    build: BuildArgs,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Lowest-energy reads averaged per input.
    #[arg(long)]
    k: Option<usize>,
    /// `text` or `csv`.
    #[arg(long)]
    format: Option<TableFormat>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    reads: Option<usize>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
