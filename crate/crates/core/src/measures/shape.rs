use crate::error::{Error, Result};
use crate::measures::base::{Atom, BaseMeasure};
use crate::measures::partition::ObservationSet;

/// The shape `θH` of a Dirichlet or Gamma process.
///
/// A shape remembers its prior `(θ₀, H₀)` and integer observation counts, so
/// that posterior updates `θ₀H₀ + Σ δ_{Y_i}` are exact: the derived `θ` and
/// `H` depend only on the prior and the multiset of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeMeasure {
    theta: f64,
    base: BaseMeasure,
    prior_theta: f64,
    prior_base: BaseMeasure,
    /// Observed locations (sorted) with multiplicities.
    counts: Vec<(f64, u64)>,
}

impl ShapeMeasure {
    pub fn new(theta: f64, base: BaseMeasure) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "total mass theta must be positive, got {theta}"
            )));
        }
        Ok(Self {
            theta,
            base: base.clone(),
            prior_theta: theta,
            prior_base: base,
            counts: Vec::new(),
        })
    }

    /// Total mass `θ`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Normalized base measure `H`.
    pub fn base(&self) -> &BaseMeasure {
        &self.base
    }

    pub fn prior_theta(&self) -> f64 {
        self.prior_theta
    }

    pub fn prior_base(&self) -> &BaseMeasure {
        &self.prior_base
    }

    /// Observed locations (sorted) with their multiplicities.
    pub fn observations(&self) -> &[(f64, u64)] {
        &self.counts
    }

    /// Number of observations folded into this shape.
    pub fn n_observations(&self) -> u64 {
        self.counts.iter().map(|c| c.1).sum()
    }

    /// `θ` times the atom mass of `H` inside `{y : pred(y)}`.
    pub fn mass_of_atoms<P: Fn(f64) -> bool>(&self, pred: P) -> f64 {
        self.theta
            * self
                .base
                .atoms()
                .iter()
                .filter(|a| pred(a.location))
                .map(|a| a.prob)
                .sum::<f64>()
    }
}

/// Posterior shape `(θ+n)H_n = θH + Σ δ_{Y_i}`.
///
/// Observation atoms are merged with existing atoms at bitwise-equal
/// locations. Updating with `Y₁` then `Y₂` gives exactly the same shape as
/// updating with `{Y₁, Y₂}`.
pub fn posterior_shape(shape: &ShapeMeasure, obs: &ObservationSet) -> ShapeMeasure {
    if obs.is_empty() {
        return shape.clone();
    }
    let mut counts = shape.counts.clone();
    for (&y, &c) in obs.uniques().iter().zip(&obs.counts()) {
        match counts.iter_mut().find(|(x, _)| x.to_bits() == y.to_bits()) {
            Some(entry) => entry.1 += c as u64,
            None => counts.push((y, c as u64)),
        }
    }
    counts.sort_by(|a, b| a.0.total_cmp(&b.0));

    let theta0 = shape.prior_theta;
    let n: u64 = counts.iter().map(|c| c.1).sum();
    let theta = theta0 + n as f64;
    let prior = &shape.prior_base;
    let count_at = |y: f64| {
        counts
            .iter()
            .find(|(x, _)| x.to_bits() == y.to_bits())
            .map_or(0, |c| c.1)
    };
    let mut atoms: Vec<Atom> = prior
        .atoms()
        .iter()
        .map(|a| Atom {
            location: a.location,
            prob: (theta0 * a.prob + count_at(a.location) as f64) / theta,
        })
        .collect();
    for &(y, c) in &counts {
        if prior.atom_prob(y) == 0.0 {
            atoms.push(Atom {
                location: y,
                prob: c as f64 / theta,
            });
        }
    }
    let diffuse = prior.diffuse().map(|(d, w)| (d, theta0 * w / theta));
    let base = BaseMeasure::new(diffuse, atoms).expect("posterior of a valid shape is valid");
    ShapeMeasure {
        theta,
        base,
        prior_theta: theta0,
        prior_base: prior.clone(),
        counts,
    }
}
