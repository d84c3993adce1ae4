//! Spectral cut-off deconvolution of a density from noisy observations
//! `Y = X + ε`, with the error density either known or estimated from an
//! auxiliary sample, plus the Monte Carlo tooling used to check its risk.

pub mod error;
pub mod estimators;
pub mod models;
pub mod regularization;
pub mod risk;
pub mod rng;
pub mod spectral;

pub use error::{DeconvError, Result};
