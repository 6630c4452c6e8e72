//! The classically trained network: conv → sigmoid → max-pool → dense →
//! softmax, with bias-free layers.
//!
//! The post-sigmoid convolution activations are the features handed to the
//! QUBO builder. The max-pool and dense layers define the classical
//! prediction and supply the class weights.

mod io;
mod scaled;
mod train;

use ndarray::{Array2, Array3};

use crate::error::{Error, Result};

pub use io::{
    canonical_glyphs, format_glyphs, parse_features, parse_glyphs, read_features, read_glyphs,
    read_weights, write_weights, FeatureVector,
};
pub use scaled::{ScaledForward, ScaledNetwork};
pub use train::{accuracy, loss_and_gradient, train, Architecture, Gradients, TrainConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    /// `(filters, height, width)`.
    pub filters: Array3<f64>,
    pub stride: usize,
}

impl ConvLayer {
    pub fn num_filters(&self) -> usize {
        self.filters.dim().0
    }

    pub fn filter_shape(&self) -> (usize, usize) {
        let (_, h, w) = self.filters.dim();
        (h, w)
    }

    /// Output size along one axis, or `None` if the filter does not fit.
    pub fn output_len(&self, input: usize, filter: usize) -> Option<usize> {
        (input >= filter && self.stride > 0).then(|| (input - filter) / self.stride + 1)
    }

    /// `(height, width)` of each filter's output map.
    pub fn output_shape(&self, input: (usize, usize)) -> Result<(usize, usize)> {
        let (fh, fw) = self.filter_shape();
        match (self.output_len(input.0, fh), self.output_len(input.1, fw)) {
            (Some(h), Some(w)) => Ok((h, w)),
            _ => Err(Error::Dimension(format!(
                "{fh}x{fw} filter with stride {} does not fit a {}x{} input",
                self.stride, input.0, input.1
            ))),
        }
    }

    /// Pre-activation maps, `(filter, row, col)`.
    pub fn apply(&self, image: &Array2<f64>) -> Result<Array3<f64>> {
        let (oh, ow) = self.output_shape(image.dim())?;
        let (d, fh, fw) = self.filters.dim();
        let s = self.stride;
        Ok(Array3::from_shape_fn((d, oh, ow), |(f, oy, ox)| {
            let mut acc = 0.0;
            for dy in 0..fh {
                for dx in 0..fw {
                    acc += self.filters[[f, dy, dx]] * image[[oy * s + dy, ox * s + dx]];
                }
            }
            acc
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolSpec {
    pub height: usize,
    pub width: usize,
    pub stride: usize,
}

/// The convolutional front end together with the geometry it expects.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvStage {
    pub conv: ConvLayer,
    /// `(height, width)` of input images.
    pub input: (usize, usize),
    pub pool: PoolSpec,
}

impl ConvStage {
    /// `(filters, height, width)` of the activation maps.
    pub fn feature_shape(&self) -> Result<(usize, usize, usize)> {
        let (h, w) = self.conv.output_shape(self.input)?;
        Ok((self.conv.num_filters(), h, w))
    }

    pub fn feature_len(&self) -> Result<usize> {
        let (d, h, w) = self.feature_shape()?;
        Ok(d * h * w)
    }

    /// `(filters, height, width)` after max pooling.
    pub fn pooled_shape(&self) -> Result<(usize, usize, usize)> {
        let (d, h, w) = self.feature_shape()?;
        let p = self.pool;
        let fits = h >= p.height && w >= p.width && p.stride > 0;
        if !fits {
            return Err(Error::Dimension(format!(
                "{}x{} pooling does not fit {h}x{w} feature maps",
                p.height, p.width
            )));
        }
        Ok((
            d,
            (h - p.height) / p.stride + 1,
            (w - p.width) / p.stride + 1,
        ))
    }

    /// For each pooled output (in pooled order) the feature indices in its
    /// window. Features are numbered filter-major, then row, then column.
    pub fn pool_groups(&self) -> Result<Vec<Vec<usize>>> {
        let (_, fh, fw) = self.feature_shape()?;
        let (d, ph, pw) = self.pooled_shape()?;
        let p = self.pool;
        let mut groups = Vec::with_capacity(d * ph * pw);
        for f in 0..d {
            for py in 0..ph {
                for px in 0..pw {
                    let mut members = Vec::with_capacity(p.height * p.width);
                    for dy in 0..p.height {
                        for dx in 0..p.width {
                            let (y, x) = (py * p.stride + dy, px * p.stride + dx);
                            members.push(f * fh * fw + y * fw + x);
                        }
                    }
                    groups.push(members);
                }
            }
        }
        Ok(groups)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkWeights {
    pub conv: Option<ConvStage>,
    /// Rows are input features (pooled outputs when `conv` is present),
    /// columns are classes.
    pub dense: Array2<f64>,
}

impl NetworkWeights {
    pub fn num_classes(&self) -> usize {
        self.dense.ncols()
    }

    /// Checks finiteness and that the dense layer matches the pooled size.
    pub fn validate(&self) -> Result<()> {
        if self.dense.ncols() == 0 || self.dense.nrows() == 0 {
            return Err(Error::Dimension("dense layer is empty".into()));
        }
        let finite = self.dense.iter().all(|v| v.is_finite())
            && self
                .conv
                .as_ref()
                .is_none_or(|c| c.conv.filters.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(Error::Range("weights must be finite".into()));
        }
        if let Some(stage) = &self.conv {
            let (d, h, w) = stage.pooled_shape()?;
            if d * h * w != self.dense.nrows() {
                return Err(Error::Dimension(format!(
                    "pooling yields {} values but the dense layer has {} rows",
                    d * h * w,
                    self.dense.nrows()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage {
    pub pixels: Array2<f64>,
    pub label: usize,
}

impl LabeledImage {
    pub fn new(pixels: Array2<f64>, label: usize) -> Result<Self> {
        if let Some(p) = pixels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Range(format!("pixel value {p} outside [0, 1]")));
        }
        Ok(Self { pixels, label })
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    /// Post-sigmoid convolution activations, filter-major.
    pub features: Vec<f64>,
    /// Max-pooled activations, the dense layer's input.
    pub pooled: Vec<f64>,
    /// For each pooled value, the feature index that won its window.
    pub winners: Vec<usize>,
    pub logits: Vec<f64>,
    pub scores: Vec<f64>,
}

impl Forward {
    pub fn predicted(&self) -> usize {
        argmax(&self.scores)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// `x · W` for a row vector `x`.
pub fn dense_logits(dense: &Array2<f64>, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != dense.nrows() {
        return Err(Error::Dimension(format!(
            "{} inputs for a dense layer with {} rows",
            x.len(),
            dense.nrows()
        )));
    }
    Ok((0..dense.ncols())
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(i, &xi)| xi * dense[[i, k]])
                .sum()
        })
        .collect())
}

pub fn forward(weights: &NetworkWeights, image: &LabeledImage) -> Result<Forward> {
    let stage = weights
        .conv
        .as_ref()
        .ok_or_else(|| Error::Dimension("network has no convolutional stage".into()))?;
    if image.pixels.dim() != stage.input {
        return Err(Error::Dimension(format!(
            "image is {:?}, network expects {:?}",
            image.pixels.dim(),
            stage.input
        )));
    }
    let features: Vec<f64> = stage
        .conv
        .apply(&image.pixels)?
        .iter()
        .map(|&z| sigmoid(z))
        .collect();
    let groups = stage.pool_groups()?;
    let mut pooled = Vec::with_capacity(groups.len());
    let mut winners = Vec::with_capacity(groups.len());
    for group in &groups {
        let mut win = group[0];
        for &m in &group[1..] {
            if features[m] > features[win] {
                win = m;
            }
        }
        pooled.push(features[win]);
        winners.push(win);
    }
    let logits = dense_logits(&weights.dense, &pooled)?;
    let scores = softmax(&logits);
    Ok(Forward {
        features,
        pooled,
        winners,
        logits,
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sigmoid_derivative_matches_finite_differences() {
        let eps = 1e-6;
        for z in [-8.0, -2.5, -0.3, 0.0, 0.7, 3.0, 9.0] {
            let s = sigmoid(z);
            let numeric = (sigmoid(z + eps) - sigmoid(z - eps)) / (2.0 * eps);
            assert!((s * (1.0 - s) - numeric).abs() < 1e-9, "z = {z}");
        }
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(800.0) == 1.0 && sigmoid(-800.0) == 0.0);
    }

    pub(crate) fn fixture_weights(filters: Array3<f64>, dense: Array2<f64>) -> NetworkWeights {
        NetworkWeights {
            conv: Some(ConvStage {
                conv: ConvLayer { filters, stride: 2 },
                input: (5, 5),
                pool: PoolSpec {
                    height: 2,
                    width: 2,
                    stride: 2,
                },
            }),
            dense,
        }
    }

    #[test]
    fn zero_network_is_uniform() {
        let w = fixture_weights(Array3::zeros((5, 3, 3)), Array2::zeros((5, 5)));
        let img = LabeledImage::new(Array2::zeros((5, 5)), 0).unwrap();
        let out = forward(&w, &img).unwrap();
        assert!(out.features.iter().all(|&a| a == 0.5));
        assert!(out.scores.iter().all(|&s| (s - 0.2).abs() < 1e-15));
    }

    #[test]
    fn fixture_geometry() {
        let w = fixture_weights(Array3::zeros((5, 3, 3)), Array2::zeros((5, 5)));
        let stage = w.conv.as_ref().unwrap();
        assert_eq!(stage.feature_shape().unwrap(), (5, 2, 2));
        assert_eq!(stage.pooled_shape().unwrap(), (5, 1, 1));
        let groups = stage.pool_groups().unwrap();
        assert_eq!(groups.len(), 5);
        assert_eq!(groups[2], vec![8, 9, 10, 11]);
        w.validate().unwrap();
    }

    #[test]
    fn geometry_errors() {
        let w = fixture_weights(Array3::zeros((5, 3, 3)), Array2::zeros((4, 5)));
        assert!(matches!(w.validate(), Err(Error::Dimension(_))));
        let w = fixture_weights(Array3::zeros((5, 3, 3)), Array2::zeros((5, 5)));
        let img = LabeledImage::new(Array2::zeros((4, 5)), 0).unwrap();
        assert!(matches!(forward(&w, &img), Err(Error::Dimension(_))));
        assert!(LabeledImage::new(Array2::from_elem((2, 2), 1.5), 0).is_err());
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.1, 0.9]), 1);
    }

    fn arb_network() -> impl Strategy<Value = (NetworkWeights, LabeledImage)> {
        (
            proptest::collection::vec(-2.0f64..2.0, 45),
            proptest::collection::vec(-2.0f64..2.0, 25),
            proptest::collection::vec(0.0f64..=1.0, 25),
        )
            .prop_map(|(f, d, p)| {
                let w = fixture_weights(
                    Array3::from_shape_vec((5, 3, 3), f).unwrap(),
                    Array2::from_shape_vec((5, 5), d).unwrap(),
                );
                let img = LabeledImage::new(Array2::from_shape_vec((5, 5), p).unwrap(), 0).unwrap();
                (w, img)
            })
    }

    proptest! {
        #[test]
        fn softmax_is_normalised_and_shift_invariant(
            logits in proptest::collection::vec(-30.0f64..30.0, 1..12),
            shift in -50.0f64..50.0,
        ) {
            let a = softmax(&logits);
            prop_assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let shifted: Vec<f64> = logits.iter().map(|z| z + shift).collect();
            for (x, y) in a.iter().zip(softmax(&shifted)) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn forward_invariants((w, img) in arb_network()) {
            let out = forward(&w, &img).unwrap();
            prop_assert!((out.scores.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert_eq!(argmax(&out.scores), argmax(&out.logits));
            let groups = w.conv.as_ref().unwrap().pool_groups().unwrap();
            for (g, &p) in groups.iter().zip(&out.pooled) {
                prop_assert!(g.iter().all(|&m| out.features[m] <= p));
                prop_assert!(g.iter().any(|&m| out.features[m] == p));
            }
            prop_assert_eq!(forward(&w, &img).unwrap(), out);
        }
    }
}
