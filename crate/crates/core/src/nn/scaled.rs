use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dense_logits, sigmoid, softmax, ConvLayer};
use crate::error::{Error, Result};

/// A four-layer network used to size and time larger models: a
/// convolution over a 14×14 image (8 filters, 5×5, stride 3, giving 128
/// activations), a 24-unit sigmoid hidden layer and 10 output classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledNetwork {
    pub conv: ConvLayer,
    pub input: (usize, usize),
    /// Conv activations → hidden units.
    pub hidden: Array2<f64>,
    /// Hidden units → classes.
    pub output: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledForward {
    pub features: Vec<f64>,
    pub hidden: Vec<f64>,
    pub scores: Vec<f64>,
}

impl ScaledNetwork {
    pub const INPUT: (usize, usize) = (14, 14);
    pub const FILTERS: usize = 8;
    pub const FILTER: usize = 5;
    pub const STRIDE: usize = 3;
    pub const HIDDEN: usize = 24;
    pub const CLASSES: usize = 10;

    /// Weights uniform in `[-0.5, 0.5]`.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || rng.gen_range(-0.5..=0.5);
        let conv = ConvLayer {
            filters: Array3::from_shape_simple_fn(
                (Self::FILTERS, Self::FILTER, Self::FILTER),
                &mut draw,
            ),
            stride: Self::STRIDE,
        };
        let features = Self::FILTERS * Self::conv_side() * Self::conv_side();
        let hidden = Array2::from_shape_simple_fn((features, Self::HIDDEN), &mut draw);
        let output = Array2::from_shape_simple_fn((Self::HIDDEN, Self::CLASSES), &mut draw);
        Self {
            conv,
            input: Self::INPUT,
            hidden,
            output,
        }
    }

    fn conv_side() -> usize {
        (Self::INPUT.0 - Self::FILTER) / Self::STRIDE + 1
    }

    /// Conv activations, hidden units and classes.
    pub fn layer_sizes(&self) -> (usize, usize, usize) {
        (
            self.hidden.nrows(),
            self.hidden.ncols(),
            self.output.ncols(),
        )
    }

    pub fn forward(&self, image: &Array2<f64>) -> Result<ScaledForward> {
        if image.dim() != self.input {
            return Err(Error::Dimension(format!(
                "image is {:?}, network expects {:?}",
                image.dim(),
                self.input
            )));
        }
        let features: Vec<f64> = self
            .conv
            .apply(image)?
            .iter()
            .map(|&z| sigmoid(z))
            .collect();
        let hidden: Vec<f64> = dense_logits(&self.hidden, &features)?
            .into_iter()
            .map(sigmoid)
            .collect();
        let scores = softmax(&dense_logits(&self.output, &hidden)?);
        Ok(ScaledForward {
            features,
            hidden,
            scores,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_sizes() {
        let net = ScaledNetwork::random(1);
        assert_eq!(net.layer_sizes(), (128, 24, 10));
        let out = net.forward(&Array2::from_elem((14, 14), 0.5)).unwrap();
        assert_eq!(out.features.len(), 128);
        assert!((out.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(net.forward(&Array2::zeros((5, 5))).is_err());
    }
}
