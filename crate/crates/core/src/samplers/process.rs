//! Random-measure samplers: truncated stick-breaking for the Dirichlet
//! process, and the Gamma and Beta-Gamma processes built from it.

use rand::Rng;

use crate::error::{ensure, Error, Result};
use crate::measures::{BaseMeasure, Diffuse, Functional, RandomMeasureRealization, ShapeMeasure};
use crate::samplers::scalar::{beta, gamma};

/// `Y ~ H`: atoms with their probabilities, the diffuse part by inverse CDF
/// where it has a closed form and by a Gamma ratio otherwise.
pub fn sample_base<R: Rng + ?Sized>(h: &BaseMeasure, rng: &mut R) -> f64 {
    let atoms = h.atoms();
    if atoms.len() == 1 && h.diffuse().is_none() {
        return atoms[0].location;
    }
    let mut u: f64 = rng.random();
    if let Some((d, w)) = h.diffuse() {
        if u < w || atoms.is_empty() {
            return sample_diffuse(&d, rng);
        }
        u -= w;
    }
    for atom in atoms {
        if u < atom.prob {
            return atom.location;
        }
        u -= atom.prob;
    }
    // Rounding left u just past the last atom.
    atoms.last().map_or_else(|| 0.0, |a| a.location)
}

fn sample_diffuse<R: Rng + ?Sized>(d: &Diffuse, rng: &mut R) -> f64 {
    match *d {
        Diffuse::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
        Diffuse::Beta { a, b } if a == 0.5 && b == 0.5 => {
            let s = (0.5 * std::f64::consts::PI * rng.random::<f64>()).sin();
            s * s
        }
        Diffuse::Beta { a, b } => beta(a, b, rng),
    }
}

/// Number of sticks `N = ⌈log ε / log(θ/(1+θ))⌉`, so that the expected
/// leftover mass `(θ/(1+θ))^N` is at most `ε`.
pub fn stick_count(theta: f64, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation eps must lie in (0, 1), got {eps}"
        )));
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "theta must be positive, got {theta}"
        )));
    }
    let ratio = theta / (1.0 + theta);
    let n = (eps.ln() / ratio.ln()).ceil();
    Ok((n as usize).max(1))
}

/// Truncated stick-breaking sampler for `Dirichlet(θH)`.
///
/// Each draw has `N` sticks with `V_k ~ Beta(1, θ)`, plus one extra atom from
/// `H` carrying the leftover stick so the weights sum to one exactly.
#[derive(Debug, Clone)]
pub struct DirichletSampler {
    shape: ShapeMeasure,
    sticks: usize,
    eps: f64,
}

impl DirichletSampler {
    pub fn new(shape: &ShapeMeasure, eps: f64) -> Result<Self> {
        Ok(Self {
            sticks: stick_count(shape.theta(), eps)?,
            shape: shape.clone(),
            eps,
        })
    }

    pub fn sticks(&self) -> usize {
        self.sticks
    }

    pub fn shape(&self) -> &ShapeMeasure {
        &self.shape
    }

    /// Streams the `(location, weight)` pairs of one draw into `visit`.
    pub fn visit<R: Rng + ?Sized, F: FnMut(f64, f64)>(&self, rng: &mut R, mut visit: F) {
        let theta = self.shape.theta();
        let base = self.shape.base();
        let mut rest = 1.0;
        for _ in 0..self.sticks {
            let v = beta(1.0, theta, rng);
            let w = v * rest;
            rest -= w;
            let y = sample_base(base, rng);
            if w > 0.0 {
                visit(y, w);
            }
            if rest <= 0.0 {
                return;
            }
        }
        let y = sample_base(base, rng);
        visit(y, rest);
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> RandomMeasureRealization {
        let mut atoms = Vec::with_capacity(self.sticks + 1);
        self.visit(rng, |y, w| atoms.push((y, w)));
        RandomMeasureRealization::normalized(atoms, self.eps)
            .expect("stick-breaking weights are positive and sum to one")
    }

    /// `P(g)` of one draw, without materializing the atoms.
    pub fn functional<R: Rng + ?Sized>(&self, rng: &mut R, g: &Functional) -> f64 {
        let mut acc = 0.0;
        self.visit(rng, |y, w| acc += w * g.eval(y));
        acc
    }
}

/// `P ~ Dirichlet(θH)` by truncated stick-breaking.
pub fn sample_dirichlet_sb<R: Rng + ?Sized>(
    shape: &ShapeMeasure,
    eps: f64,
    rng: &mut R,
) -> Result<RandomMeasureRealization> {
    Ok(DirichletSampler::new(shape, eps)?.draw(rng))
}

/// `μ ~ Gamma(θH)` as `T_θ · P` with `T_θ` independent of `P`.
pub fn sample_gamma_process<R: Rng + ?Sized>(
    shape: &ShapeMeasure,
    eps: f64,
    rng: &mut R,
) -> Result<RandomMeasureRealization> {
    sample_beta_gamma(shape, 0.0, eps, rng)
}

/// Beta-Gamma process `μ_{θ,d} = T_{θ-d} · P` with `P ~ Dirichlet(θH)`.
pub fn sample_beta_gamma<R: Rng + ?Sized>(
    shape: &ShapeMeasure,
    d: f64,
    eps: f64,
    rng: &mut R,
) -> Result<RandomMeasureRealization> {
    ensure(shape.theta() - d > 0.0, "theta - d > 0")?;
    let p = sample_dirichlet_sb(shape, eps, rng)?;
    let t = gamma(shape.theta() - d, rng);
    p.scaled(t)
}

/// Draws `μ_{θ,d}(g)` and related scalars without allocating.
#[derive(Debug, Clone)]
pub struct BetaGammaSampler {
    dirichlet: DirichletSampler,
    mass_shape: f64,
}

impl BetaGammaSampler {
    /// `d = 0` gives the Gamma process.
    pub fn new(shape: &ShapeMeasure, d: f64, eps: f64) -> Result<Self> {
        ensure(shape.theta() - d > 0.0, "theta - d > 0")?;
        Ok(Self {
            dirichlet: DirichletSampler::new(shape, eps)?,
            mass_shape: shape.theta() - d,
        })
    }

    /// Returns `(T, P(g))`; the measure's functional is `T · P(g)`.
    pub fn mass_and_mean<R: Rng + ?Sized>(&self, rng: &mut R, g: &Functional) -> (f64, f64) {
        let pg = self.dirichlet.functional(rng, g);
        let t = gamma(self.mass_shape, rng);
        (t, pg)
    }

    pub fn functional<R: Rng + ?Sized>(&self, rng: &mut R, g: &Functional) -> f64 {
        let (t, pg) = self.mass_and_mean(rng, g);
        t * pg
    }
}
