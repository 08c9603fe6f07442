//! Verification harness: Monte Carlo estimators of transforms, KS
//! statistics, and the registry of named identity checks.

mod checks;
pub mod ks;
mod registry;
mod report;

pub use crate::mc::McEstimate;
pub use checks::*;
pub use ks::{ks_threshold_one_sample, ks_threshold_two_sample, ks_two_sample, ks_vs_cdf, KS_C99, KS_C999};
pub use registry::{find_check, list_checks, registry, CheckSpec};
pub use report::{CheckParams, CheckReport, GridPoint, Rule};

use crate::error::{Error, Result};
use crate::mc;
use crate::measures::{Functional, ShapeMeasure};
use crate::rng::RngStream;
use crate::samplers::{BetaGammaSampler, DirichletSampler};

fn check_grid(shape: &ShapeMeasure, g: &Functional, zs: &[f64]) -> Result<()> {
    let (lo, hi) = g.range_on(shape.base());
    for &z in zs {
        if !(z >= 0.0 && z.is_finite()) {
            return Err(Error::Domain(format!(
                "z must be a finite nonnegative number, got {z}"
            )));
        }
        if 1.0 + z * lo <= 0.0 || 1.0 + z * hi <= 0.0 {
            return Err(Error::Domain(format!(
                "1 + {z}·g(y) must be positive on the support; g ranges over [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

/// `E[(1 + z P(g))^{-q}]` at every `z` in `zs`, from the same `n` draws of
/// `P ~ Dirichlet(θH)`.
pub fn cs_transform_mc_grid(
    shape: &ShapeMeasure,
    g: &Functional,
    zs: &[f64],
    q: f64,
    n: usize,
    eps: f64,
    stream: &RngStream,
) -> Result<Vec<McEstimate>> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
    }
    check_grid(shape, g, zs)?;
    let sampler = DirichletSampler::new(shape, eps)?;
    let acc = mc::accumulate(n, zs.len(), stream, |rng, out| {
        let pg = sampler.functional(rng, g);
        for (o, &z) in out.iter_mut().zip(zs) {
            *o = (-q * (z * pg).ln_1p()).exp();
        }
    });
    Ok(acc.iter().map(|a| a.estimate(stream)).collect())
}

/// `E[(1 + z P(g))^{-q}]` over `n` stick-breaking draws of `P`.
pub fn cs_transform_mc(
    shape: &ShapeMeasure,
    g: &Functional,
    z: f64,
    q: f64,
    n: usize,
    eps: f64,
    stream: &RngStream,
) -> Result<McEstimate> {
    Ok(cs_transform_mc_grid(shape, g, &[z], q, n, eps, stream)?.remove(0))
}

/// `E[e^{-z μ(g)}]` for the Beta-Gamma process with parameters `(θH, d)`, at
/// every `z` in `zs`.
pub fn bg_laplace_mc_grid(
    shape: &ShapeMeasure,
    d: f64,
    g: &Functional,
    zs: &[f64],
    n: usize,
    eps: f64,
    stream: &RngStream,
) -> Result<Vec<McEstimate>> {
    check_grid(shape, g, zs)?;
    let sampler = BetaGammaSampler::new(shape, d, eps)?;
    let acc = mc::accumulate(n, zs.len(), stream, |rng, out| {
        let mg = sampler.functional(rng, g);
        for (o, &z) in out.iter_mut().zip(zs) {
            *o = (-z * mg).exp();
        }
    });
    Ok(acc.iter().map(|a| a.estimate(stream)).collect())
}

/// `E[e^{-z μ(g)}]` with `μ` Beta-Gamma `(θH, d)`; `d = θ - q` matches the
/// transform of order `q`.
pub fn bg_laplace_mc(
    shape: &ShapeMeasure,
    d: f64,
    g: &Functional,
    z: f64,
    n: usize,
    eps: f64,
    stream: &RngStream,
) -> Result<McEstimate> {
    Ok(bg_laplace_mc_grid(shape, d, g, &[z], n, eps, stream)?.remove(0))
}
