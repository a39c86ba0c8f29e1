//! Density-matrix simulation of noisy parametrized circuits and spectral analysis of their
//! quantum Fisher information.

pub mod channels;
pub mod dla;
pub mod error;
pub mod experiments;
pub mod qfim;
pub mod qnn;
pub mod rng;
pub mod sampling;
pub mod tensor;

pub use error::{Error, Result};
