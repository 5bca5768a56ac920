//! Gaussian process modeling and classification of sparse, irregularly
//! sampled lightcurves.
//!
//! The pipeline runs ingestion ([`lightcurve`]) → posterior fitting
//! ([`gp`]) → measures ([`features`]) → classifiers and evaluation schemes
//! ([`classify`]). [`synth`] generates labeled curves with survey-like
//! cadence for testing and benchmarking.

pub mod benchmark;
pub mod classify;
pub mod error;
pub mod features;
pub mod gp;
pub mod kv;
pub mod lightcurve;
pub mod stats;
pub mod synth;

pub use error::{ClassifyError, DataError, Error, FeatureError, GpError, SynthError};
