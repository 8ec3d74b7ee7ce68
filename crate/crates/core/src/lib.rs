//! Desk-scale numerics for Gaussian measures on path space.
//!
//! The crate builds classical Wiener space as an executable object: sampled
//! covariance kernels and their dyadic grids, the Cameron-Martin space with
//! translation densities, the Lévy-Schauder construction, cylinder-set
//! measures, Wiener chaos with an exact Malliavin calculus (derivative,
//! divergence, number operator), Clark-Ocone hedging, and the
//! Ornstein-Uhlenbeck semigroup with its inequality suite (Poincaré,
//! exponential decay, commutation, log-Sobolev).
//!
//! Everything is deterministic given a [`stream::RandomStream`]: replicate
//! and phase splittings make every Monte Carlo experiment reproducible
//! bit for bit, independent of thread scheduling. Batch work is distributed
//! with rayon when the default `parallel` feature is on and runs serially
//! without it; results are identical either way.

#![forbid(unsafe_code)]

pub mod chaos;
pub mod clark_ocone;
pub mod cm;
pub mod cylinder;
pub mod error;
pub mod grid;
pub mod haar;
pub mod kernels;
pub mod linalg;
pub mod malliavin;
pub mod ou;
pub mod parallel;
pub mod quadrature;
pub mod stats;
pub mod stream;

pub use chaos::{ChaosExpansion, HValuedChaos, MultiIndex};
pub use clark_ocone::{HedgeResult, PayoffSpec, ReplicationSummary};
pub use cm::{CMElement, CMModel};
pub use cylinder::{AdditivityDemo, CylinderSetSpec, ProbeNorm, ProbeResult};
pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use haar::{BasisFamily, HaarIndex, LevyConstruction};
pub use kernels::{KernelSpec, PathSample, PathSampler};
pub use malliavin::{CylinderFunction, FunctionalFamily, Phi};
pub use quadrature::GaussHermite;
pub use stream::RandomStream;
