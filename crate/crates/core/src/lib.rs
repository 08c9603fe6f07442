//! Simulation and verification of linear functionals of Dirichlet processes,
//! Gamma processes and Beta-Gamma processes.
//!
//! The crate is layered bottom-up:
//!
//! * [`measures`]: base measures, shapes, functionals, realizations, partitions.
//! * [`samplers`]: stick-breaking, Gamma and Beta-Gamma processes, urn schemes,
//!   scalar Gamma/Beta/stable draws.
//! * [`transforms`]: closed forms and quadratures for transforms of `P(g)`.
//! * [`identities`]: Monte Carlo estimators, KS tests and the registry of checks.
//! * [`cli`]: config parsing and the experiment runner behind the `dpcalc` binary.

pub mod cli;
pub mod error;
pub mod identities;
pub mod mc;
pub mod measures;
pub mod rng;
pub mod samplers;
pub mod transforms;

pub use error::{Error, Result};
pub use measures::{
    BaseMeasure, Diffuse, Functional, ObservationSet, Partition, RandomMeasureRealization, ShapeMeasure,
};
pub use rng::RngStream;

/// Default truncation level for stick-breaking draws.
pub const DEFAULT_EPS: f64 = 1e-8;
/// Default Gauss-Jacobi order for the `u`-integrals.
pub const DEFAULT_QUAD_ORDER: usize = 64;
