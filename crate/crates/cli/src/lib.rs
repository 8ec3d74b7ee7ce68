//! Experiment runner for the Gaussian-measure laboratory.
//!
//! Everything the binary does is reachable as a library call: build an
//! [`ExperimentConfig`], pass it to [`run`], and emit the returned
//! [`Report`]. A config fully determines its CSV body, byte for byte.

#![forbid(unsafe_code)]

pub mod error;
pub mod experiments;
pub mod report;

pub use error::CliError;
pub use experiments::{run, ExperimentConfig};
pub use report::{Field, Report};
