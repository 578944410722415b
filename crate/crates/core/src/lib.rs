//! Outdoor mean radiant temperature estimation from six-directional
//! radiative fluxes, fisheye-derived sky geometry, and a physics-informed
//! neural network trained through a differentiable radiation layer.
//!
//! The crate is organized around the processing pipeline:
//!
//! - [`solar`]: sun altitude/azimuth and minutes from sunrise
//! - [`fisheye`]: cube-map to equiangular hemispherical projection
//! - [`sky`]: sky segmentation, sky view factor, sun-disk shade test
//! - [`radiation`]: the six-directional flux balance and its gradient
//! - [`dataset`]: CSV ingestion, cleaning, and the synthetic scene generator
//! - [`features`]: assembly of model input vectors with ablation masking
//! - [`nn`]: dense network engine, physics-informed training, cross
//!   validation and random hyperparameter search
//! - [`metrics`]: RMSE / R^2 / MAPE / MBE and shade accuracy
//! - [`config`]: flat key-value run configuration

pub mod config;
pub mod dataset;
pub mod error;
pub mod features;
pub mod fisheye;
pub mod metrics;
pub mod nn;
pub mod radiation;
pub mod sky;
pub mod solar;
pub mod synth;

pub use error::{CoreError, Result};
