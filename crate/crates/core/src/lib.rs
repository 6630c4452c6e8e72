//! Classify with a trained neural network by sampling low-energy states of
//! an equivalent QUBO model.
//!
//! The pipeline: train a small CNN ([`nn`]), turn its weights and an input's
//! features into a [`Qubo`] ([`build`]), draw low-energy states with a
//! classical sampler ([`samplers`]), and read the class from a consensus over
//! the lowest-energy samples ([`inference`]).

pub mod bench;
pub mod build;
pub mod error;
pub mod inference;
pub mod nn;
pub mod qubo;
pub mod samplers;
mod text;

pub use error::{Error, Result};
pub use qubo::{Qubo, SampleSet, State};
pub use samplers::{Backend, Sampler, SamplerConfig};
