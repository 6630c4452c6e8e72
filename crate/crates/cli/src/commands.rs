use std::path::{Path, PathBuf};

use annealnet::bench::{self, BenchConfig};
use annealnet::build::{assemble, write_layout, BuildParams, ClampMode, NormalizationKind};
use annealnet::inference::{confusion, image_features, PipelineConfig};
use annealnet::nn::{
    accuracy, canonical_glyphs, read_features, read_glyphs, read_weights, train, write_weights,
    Architecture, LabeledImage, NetworkWeights, TrainConfig,
};
use annealnet::qubo::{read_qubo, write_qubo};
use annealnet::{Backend, Sampler, SamplerConfig};

use crate::config::{BetaStart, ConfigFile, TableFormat};
use crate::{
    BenchArgs, BuildArgs, BuildQuboArgs, ClassifyArgs, Cli, CliError, Command, InputArgs,
    SampleArgs, SamplerArgs, TrainArgs,
};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Train(args) => train_cmd(args, &config),
        Command::BuildQubo(args) => build_qubo(args, &config),
        Command::Sample(args) => sample(args, &config),
        Command::Classify(args) => classify(args, &config),
        Command::Bench(args) => bench_cmd(args, &config),
    }
}

fn train_cmd(args: TrainArgs, file: &ConfigFile) -> Result<()> {
    let defaults = TrainConfig::default();
    let config = TrainConfig {
        learning_rate: file.pick_or(args.learning_rate, "learning_rate", defaults.learning_rate)?,
        epochs: file.pick_or(args.epochs, "epochs", defaults.epochs)?,
        init_scale: file.pick_or(args.init_scale, "init_scale", defaults.init_scale)?,
        seed: file.pick_or(args.seed, "train_seed", defaults.seed)?,
        ..defaults
    };
    let out: PathBuf = file.require(args.out, "out")?;
    let data: Option<PathBuf> = file.pick(args.data, "data")?;

    let images = match &data {
        Some(path) => read_glyphs(path)?,
        None => canonical_glyphs(),
    };
    let arch = architecture_for(&images)?;
    let weights = train(&arch, &images, &config)?;
    let acc = accuracy(&weights, &images)?;
    write_weights(&out, &weights)?;
    println!(
        "trained on {} images for {} epochs: accuracy {acc:.4}",
        images.len(),
        config.epochs
    );
    println!("weights written to {}", out.display());
    Ok(())
}

/// The default network, sized to the data's image shape and labels.
fn architecture_for(images: &[LabeledImage]) -> Result<Architecture> {
    let first = images
        .first()
        .ok_or_else(|| CliError::Usage("no training images".into()))?;
    let classes = images.iter().map(|i| i.label).max().unwrap_or(0) + 1;
    Ok(Architecture {
        input: first.pixels.dim(),
        classes: classes.max(2),
        ..Architecture::default()
    })
}

fn build_params(args: BuildArgs, file: &ConfigFile) -> Result<BuildParams> {
    let defaults = BuildParams::default();
    let clamp_mode: Option<String> = file.pick(args.clamp_mode, "clamp_mode")?;
    let normalization: Option<String> = file.pick(args.normalization, "normalization")?;
    let params = BuildParams {
        alpha: file.pick_or(args.alpha, "alpha", defaults.alpha)?,
        penalty: file.pick(args.penalty, "penalty")?,
        clamp_mode: match clamp_mode {
            Some(s) => s.parse::<ClampMode>()?,
            None => defaults.clamp_mode,
        },
        normalization: match normalization {
            Some(s) => s.parse::<NormalizationKind>()?,
            None => defaults.normalization,
        },
    };
    if !(params.alpha > 0.0 && params.alpha.is_finite()) {
        return Err(CliError::Usage(format!(
            "alpha must be positive, got {}",
            params.alpha
        )));
    }
    if let Some(p) = params.penalty {
        if !(p > 0.0 && p.is_finite()) {
            return Err(CliError::Usage(format!(
                "penalty must be positive, got {p}"
            )));
        }
    }
    Ok(params)
}

/// Sampler settings plus whether `beta_start` should be scaled per model.
fn sampler_settings(
    args: SamplerArgs,
    file: &ConfigFile,
) -> Result<(Backend, SamplerConfig, bool)> {
    let defaults = SamplerConfig::default();
    let backend: Option<String> = file.pick(args.backend, "backend")?;
    let backend = match backend {
        Some(s) => s.parse::<Backend>()?,
        None => Backend::Anneal,
    };
    let beta_start = file.pick_or(
        args.beta_start,
        "beta_start",
        BetaStart::Fixed(defaults.beta_start),
    )?;
    let (start, hot) = match beta_start {
        BetaStart::Fixed(b) => (b, false),
        BetaStart::Auto => (defaults.beta_start, true),
    };
    let config = SamplerConfig {
        reads: file.pick_or(args.reads, "reads", defaults.reads)?,
        sweeps: file.pick_or(args.sweeps, "sweeps", defaults.sweeps)?,
        beta_start: start,
        beta_end: file.pick_or(args.beta_end, "beta_end", defaults.beta_end)?,
        seed: file.pick_or(args.seed, "seed", defaults.seed)?,
        threads: file.pick_or(args.threads, "threads", defaults.threads)?,
    };
    config.validate()?;
    Ok((backend, config, hot))
}

/// Resolves `--data`/`--features` without reading anything yet.
enum InputSource {
    Glyphs(PathBuf),
    Features(PathBuf),
}

fn input_source(args: InputArgs, file: &ConfigFile) -> Result<InputSource> {
    let data: Option<PathBuf> = file.pick(args.data.clone(), "data")?;
    let features: Option<PathBuf> = file.pick(args.features.clone(), "features")?;
    // A flag on the command line overrides the other kind of input from the file.
    match (args.data.is_some(), args.features.is_some(), data, features) {
        (true, _, Some(d), _) => Ok(InputSource::Glyphs(d)),
        (_, true, _, Some(f)) => Ok(InputSource::Features(f)),
        (_, _, Some(_), Some(_)) => Err(CliError::Usage(
            "set only one of `data` and `features`".into(),
        )),
        (_, _, Some(d), None) => Ok(InputSource::Glyphs(d)),
        (_, _, None, Some(f)) => Ok(InputSource::Features(f)),
        (_, _, None, None) => Err(CliError::Usage(
            "missing required setting `data` or `features`".into(),
        )),
    }
}

/// Labelled feature vectors in the form the QUBO builder consumes.
fn load_inputs(source: &InputSource, weights: &NetworkWeights) -> Result<Vec<(usize, Vec<f64>)>> {
    match source {
        InputSource::Glyphs(path) => {
            if weights.conv.is_none() {
                return Err(CliError::Usage(
                    "glyph input needs weights with a conv layer; use `features` for dense-only weights"
                        .into(),
                ));
            }
            read_glyphs(path)?
                .iter()
                .map(|img| Ok((img.label, image_features(weights, img)?)))
                .collect()
        }
        InputSource::Features(path) => {
            let (classes, vectors) = read_features(path)?;
            if classes != weights.num_classes() {
                return Err(annealnet::Error::Dimension(format!(
                    "{}: {classes} classes, weights have {}",
                    path.display(),
                    weights.num_classes()
                ))
                .into());
            }
            Ok(vectors.into_iter().map(|v| (v.label, v.values)).collect())
        }
    }
}

fn default_layout_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".layout");
    PathBuf::from(name)
}

fn build_qubo(args: BuildQuboArgs, file: &ConfigFile) -> Result<()> {
    let params = build_params(args.build, file)?;
    let weights_path: PathBuf = file.require(args.weights, "weights")?;
    let source = input_source(args.input, file)?;
    let index = file.pick_or(args.index, "index", 0usize)?;
    let out: PathBuf = file.require(args.out, "out")?;
    let layout_path = file
        .pick(args.layout, "layout")?
        .unwrap_or_else(|| default_layout_path(&out));

    let weights = read_weights(&weights_path)?;
    let inputs = load_inputs(&source, &weights)?;
    let (label, features) = inputs.get(index).ok_or_else(|| {
        CliError::Usage(format!(
            "index {index} out of range for {} inputs",
            inputs.len()
        ))
    })?;
    let built = assemble(features, &weights, &params)?;
    write_qubo(&out, &built.qubo)?;
    write_layout(&layout_path, &built.layout)?;
    let parts: Vec<String> = built
        .layout
        .segments()
        .iter()
        .map(|s| format!("{} {}", s.role, s.range.len()))
        .collect();
    println!(
        "input {index} (label {label}): {} nodes ({}), {} couplings",
        built.qubo.n(),
        parts.join(", "),
        built.qubo.couplings().count()
    );
    println!(
        "qubo written to {}, layout to {}",
        out.display(),
        layout_path.display()
    );
    Ok(())
}

fn sample(args: SampleArgs, file: &ConfigFile) -> Result<()> {
    let (backend, config, hot) = sampler_settings(args.sampler, file)?;
    let qubo_path: PathBuf = file.require(args.qubo, "qubo")?;
    let out: Option<PathBuf> = file.pick(args.out, "out")?;

    let qubo = read_qubo(&qubo_path)?;
    let config = if hot {
        config.with_hot_start(&qubo)
    } else {
        config
    };
    let samples = backend.sample(&qubo, &config)?;
    match out {
        Some(path) => {
            annealnet::qubo::write_sampleset(&path, &samples)?;
            let lowest = samples.lowest().map_or(f64::NAN, |s| s.energy);
            eprintln!(
                "{} reads ({} distinct states), lowest energy {lowest}; written to {}",
                samples.reads(),
                samples.len(),
                path.display()
            );
        }
        None => print!("{}", samples.to_text()),
    }
    Ok(())
}

fn classify(args: ClassifyArgs, file: &ConfigFile) -> Result<()> {
    let build = build_params(args.build, file)?;
    let (backend, sampler, hot_start) = sampler_settings(args.sampler, file)?;
    let k = file.pick_or(args.k, "k", PipelineConfig::default().k)?;
    if k == 0 || k > sampler.reads {
        return Err(CliError::Usage(format!(
            "k must be between 1 and reads ({}), got {k}",
            sampler.reads
        )));
    }
    let format = file.pick_or(args.format, "format", TableFormat::Text)?;
    let weights_path: PathBuf = file.require(args.weights, "weights")?;
    let source = input_source(args.input, file)?;

    let weights = read_weights(&weights_path)?;
    let inputs = load_inputs(&source, &weights)?;
    let pipeline = PipelineConfig {
        backend,
        sampler,
        build,
        k,
        hot_start,
    };
    let table = confusion(&inputs, &weights, &pipeline)?;
    match format {
        TableFormat::Text => {
            print!("{}", table.to_text());
            println!(
                "diagonal argmax: {}/{} (top {k} of {} reads, {backend})",
                table.diagonal_hits(),
                inputs.len(),
                pipeline.sampler.reads
            );
        }
        TableFormat::Csv => print!("{}", table.to_csv()),
    }
    Ok(())
}

fn bench_cmd(args: BenchArgs, file: &ConfigFile) -> Result<()> {
    let defaults = BenchConfig::default();
    let config = BenchConfig {
        reads: file.pick_or(args.reads, "reads", defaults.reads)?,
        sweeps: file.pick_or(args.sweeps, "sweeps", defaults.sweeps)?,
        repetitions: file.pick_or(args.repetitions, "repetitions", defaults.repetitions)?,
        seed: file.pick_or(args.seed, "seed", defaults.seed)?,
    };
    let report = bench::run(&config)?;
    println!("{report}");
    Ok(())
}
