use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{forward, ConvLayer, ConvStage, LabeledImage, NetworkWeights, PoolSpec};
use crate::error::{Error, Result};

/// Shape of a conv → pool → dense network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Architecture {
    pub input: (usize, usize),
    pub filters: usize,
    pub filter: (usize, usize),
    pub stride: usize,
    pub pool: PoolSpec,
    pub classes: usize,
}

impl Default for Architecture {
    /// Five 3×3 filters with stride 2 on 5×5 glyphs, 2×2 pooling, five classes.
    fn default() -> Self {
        Self {
            input: (5, 5),
            filters: 5,
            filter: (3, 3),
            stride: 2,
            pool: PoolSpec {
                height: 2,
                width: 2,
                stride: 2,
            },
            classes: 5,
        }
    }
}

impl Architecture {
    /// Weights drawn uniformly from `[-scale, scale]`.
    pub fn init(&self, scale: f64, seed: u64) -> Result<NetworkWeights> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || rng.gen_range(-scale..=scale);
        let (fh, fw) = self.filter;
        let filters = Array3::from_shape_simple_fn((self.filters, fh, fw), &mut draw);
        let stage = ConvStage {
            conv: ConvLayer {
                filters,
                stride: self.stride,
            },
            input: self.input,
            pool: self.pool,
        };
        let (d, h, w) = stage.pooled_shape()?;
        let dense = Array2::from_shape_simple_fn((d * h * w, self.classes), &mut draw);
        let weights = NetworkWeights {
            conv: Some(stage),
            dense,
        };
        weights.validate()?;
        Ok(weights)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub init_scale: f64,
    pub seed: u64,
    /// Training fails unless the final training-set accuracy reaches this.
    pub min_accuracy: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            epochs: 2000,
            init_scale: 0.5,
            seed: 0,
            min_accuracy: 1.0,
        }
    }
}

/// Gradient of the mean cross-entropy loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub filters: Array3<f64>,
    pub dense: Array2<f64>,
}

/// Mean cross-entropy over `data` and its gradient with respect to every
/// weight. Max pooling routes the gradient to the first maximal activation
/// of each window.
pub fn loss_and_gradient(
    weights: &NetworkWeights,
    data: &[LabeledImage],
) -> Result<(f64, Gradients)> {
    let stage = weights
        .conv
        .as_ref()
        .ok_or_else(|| Error::Dimension("network has no convolutional stage".into()))?;
    if data.is_empty() {
        return Err(Error::Argument("no training examples".into()));
    }
    let classes = weights.num_classes();
    let (d, oh, ow) = stage.feature_shape()?;
    let (_, fh, fw) = stage.conv.filters.dim();
    let s = stage.conv.stride;
    let scale = 1.0 / data.len() as f64;
    let mut loss = 0.0;
    let mut g_filters = Array3::zeros(stage.conv.filters.dim());
    let mut g_dense = Array2::zeros(weights.dense.dim());

    for example in data {
        if example.label >= classes {
            return Err(Error::Range(format!(
                "label {} for a {classes}-class network",
                example.label
            )));
        }
        let out = forward(weights, example)?;
        loss -= out.scores[example.label].ln() * scale;
        let d_logits: Vec<f64> = (0..classes)
            .map(|k| (out.scores[k] - f64::from(u8::from(k == example.label))) * scale)
            .collect();

        let mut d_features = vec![0.0; out.features.len()];
        for (i, (&p, &win)) in out.pooled.iter().zip(&out.winners).enumerate() {
            let mut d_pooled = 0.0;
            for (k, &dl) in d_logits.iter().enumerate() {
                g_dense[[i, k]] += p * dl;
                d_pooled += weights.dense[[i, k]] * dl;
            }
            d_features[win] += d_pooled;
        }

        for f in 0..d {
            for oy in 0..oh {
                for ox in 0..ow {
                    let m = f * oh * ow + oy * ow + ox;
                    let a = out.features[m];
                    let dz = d_features[m] * a * (1.0 - a);
                    if dz == 0.0 {
                        continue;
                    }
                    for dy in 0..fh {
                        for dx in 0..fw {
                            g_filters[[f, dy, dx]] +=
                                dz * example.pixels[[oy * s + dy, ox * s + dx]];
                        }
                    }
                }
            }
        }
    }
    Ok((
        loss,
        Gradients {
            filters: g_filters,
            dense: g_dense,
        },
    ))
}

/// Fraction of `data` whose most probable class matches the label.
pub fn accuracy(weights: &NetworkWeights, data: &[LabeledImage]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Argument("no examples".into()));
    }
    let mut correct = 0;
    for example in data {
        if forward(weights, example)?.predicted() == example.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}

/// Full-batch gradient descent on the mean cross-entropy loss.
pub fn train(
    arch: &Architecture,
    data: &[LabeledImage],
    config: &TrainConfig,
) -> Result<NetworkWeights> {
    let valid = config.learning_rate > 0.0
        && config.learning_rate.is_finite()
        && config.init_scale >= 0.0
        && config.init_scale.is_finite();
    if !valid {
        return Err(Error::Argument(
            "learning rate must be positive and init scale non-negative".into(),
        ));
    }
    let mut weights = arch.init(config.init_scale, config.seed)?;
    for _ in 0..config.epochs {
        let (_, grad) = loss_and_gradient(&weights, data)?;
        weights.dense.scaled_add(-config.learning_rate, &grad.dense);
        let conv = &mut weights.conv.as_mut().expect("initialised with conv").conv;
        conv.filters
            .scaled_add(-config.learning_rate, &grad.filters);
    }
    let acc = accuracy(&weights, data)?;
    if acc < config.min_accuracy {
        return Err(Error::TrainingFailed {
            accuracy: acc,
            epochs: config.epochs,
        });
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::super::canonical_glyphs;
    use super::*;

    fn loss(weights: &NetworkWeights, data: &[LabeledImage]) -> f64 {
        loss_and_gradient(weights, data).unwrap().0
    }

    fn close(analytic: f64, numeric: f64) -> bool {
        let err = (analytic - numeric).abs();
        err <= 1e-6 * analytic.abs().max(numeric.abs()) || err <= 1e-9
    }

    #[test]
    fn dense_gradient_matches_central_differences() {
        let data = canonical_glyphs();
        let w = Architecture::default().init(0.5, 3).unwrap();
        let (_, g) = loss_and_gradient(&w, &data).unwrap();
        let h = 1e-5;
        for ((i, k), &a) in g.dense.indexed_iter() {
            let (mut up, mut down) = (w.clone(), w.clone());
            up.dense[[i, k]] += h;
            down.dense[[i, k]] -= h;
            let numeric = (loss(&up, &data) - loss(&down, &data)) / (2.0 * h);
            assert!(close(a, numeric), "dense[{i},{k}]: {a} vs {numeric}");
        }
    }

    #[test]
    fn filter_gradient_matches_central_differences() {
        let data = canonical_glyphs();
        let w = Architecture::default().init(0.5, 4).unwrap();
        let (_, g) = loss_and_gradient(&w, &data).unwrap();
        let h = 1e-6;
        for ((f, y, x), &a) in g.filters.indexed_iter() {
            let (mut up, mut down) = (w.clone(), w.clone());
            up.conv.as_mut().unwrap().conv.filters[[f, y, x]] += h;
            down.conv.as_mut().unwrap().conv.filters[[f, y, x]] -= h;
            let numeric = (loss(&up, &data) - loss(&down, &data)) / (2.0 * h);
            assert!(close(a, numeric), "filter[{f},{y},{x}]: {a} vs {numeric}");
        }
    }

    #[test]
    fn fixture_trains_to_perfect_accuracy() {
        let data = canonical_glyphs();
        let w = train(&Architecture::default(), &data, &TrainConfig::default()).unwrap();
        assert_eq!(accuracy(&w, &data).unwrap(), 1.0);
        assert!(loss(&w, &data) < 0.1);
    }

    #[test]
    fn single_example_is_learned_quickly() {
        let data = &canonical_glyphs()[2..3];
        let config = TrainConfig {
            epochs: 100,
            ..Default::default()
        };
        let w = train(&Architecture::default(), data, &config).unwrap();
        assert_eq!(accuracy(&w, data).unwrap(), 1.0);
    }

    #[test]
    fn too_few_epochs_is_reported() {
        let config = TrainConfig {
            epochs: 0,
            init_scale: 0.0,
            ..Default::default()
        };
        let err = train(&Architecture::default(), &canonical_glyphs(), &config).unwrap_err();
        assert!(
            matches!(err, Error::TrainingFailed { epochs: 0, .. }),
            "{err}"
        );
    }

    #[test]
    fn bad_labels_and_empty_data() {
        let w = Architecture::default().init(0.5, 0).unwrap();
        assert!(loss_and_gradient(&w, &[]).is_err());
        let mut bad = canonical_glyphs();
        bad[0].label = 9;
        assert!(matches!(loss_and_gradient(&w, &bad), Err(Error::Range(_))));
    }
}
