//! Scalar representations of Beta-Gamma functionals: the mixture
//! representation over urn draws, and the stable-variable form of `U_{1,θ}`.

use rand::Rng;

use crate::error::{ensure, Error, Result};
use crate::measures::{Functional, ShapeMeasure};
use crate::samplers::process::DirichletSampler;
use crate::samplers::scalar::{beta, gamma, positive_stable};
use crate::samplers::urn::urn_values;

/// Smallest integer `n ≥ 0` with `θ + n - q > 0`.
pub fn default_n(theta: f64, q: f64) -> usize {
    if theta > q {
        0
    } else {
        (q - theta).floor() as usize + 1
    }
}

/// The independent ingredients of one mixture draw: `U_{a,b}`, a Gamma
/// variate, the cell variables `G_j ~ Gamma(e_j)` with the distinct urn
/// values `Y*_j`, and optionally a stable variate.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryDraws {
    pub u: f64,
    pub t: f64,
    pub gammas: Vec<f64>,
    pub locations: Vec<f64>,
    pub stable: Option<f64>,
}

impl AuxiliaryDraws {
    /// `U ~ Beta(u_a, u_b)`, `T ~ Gamma(t_shape)`, and `n` urn values from
    /// `shape` with their cell variables.
    pub fn sample<R: Rng + ?Sized>(
        shape: &ShapeMeasure,
        u_a: f64,
        u_b: f64,
        t_shape: f64,
        n: usize,
        rng: &mut R,
    ) -> Result<Self> {
        for (name, x) in [("u_a", u_a), ("u_b", u_b), ("t_shape", t_shape)] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {x}"
                )));
            }
        }
        let (gammas, locations) = cell_draws(shape, n, rng);
        Ok(Self {
            u: beta(u_a, u_b, rng),
            t: gamma(t_shape, rng),
            gammas,
            locations,
            stable: None,
        })
    }

    /// `Σ_j G_j g(Y*_j)`.
    pub fn cell_sum(&self, g: &Functional) -> f64 {
        self.gammas
            .iter()
            .zip(&self.locations)
            .map(|(w, &y)| w * g.eval(y))
            .sum()
    }
}

/// Urn draw of size `n` from `shape`, returning `G_j ~ Gamma(e_j)` and the
/// distinct values `Y*_j`.
fn cell_draws<R: Rng + ?Sized>(shape: &ShapeMeasure, n: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let values = urn_values(shape, n, rng);
    let mut locations: Vec<f64> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for v in values {
        match locations.iter().position(|u| u.to_bits() == v.to_bits()) {
            Some(j) => sizes[j] += 1,
            None => {
                locations.push(v);
                sizes.push(1);
            }
        }
    }
    let gammas = sizes.iter().map(|&e| gamma(e as f64, rng)).collect();
    (gammas, locations)
}

/// Draws of `U_{q,θ+n-q} (μ_θ(g) + Σ_j G_{j,n} g(Y*_j))`, whose law is that
/// of `μ_{θ,θ-q}(g)`.
#[derive(Debug, Clone)]
pub struct MixtureSampler {
    dirichlet: DirichletSampler,
    q: f64,
    n: usize,
}

impl MixtureSampler {
    pub fn new(shape: &ShapeMeasure, q: f64, n: usize, eps: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
        }
        ensure(shape.theta() + n as f64 - q > 0.0, "theta + n - q > 0")?;
        Ok(Self {
            dirichlet: DirichletSampler::new(shape, eps)?,
            q,
            n,
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, g: &Functional) -> f64 {
        let shape = self.dirichlet.shape();
        let theta = shape.theta();
        let pg = self.dirichlet.functional(rng, g);
        let t = gamma(theta, rng);
        let (gammas, locations) = cell_draws(shape, self.n, rng);
        let cells: f64 = gammas.iter().zip(&locations).map(|(w, &y)| w * g.eval(y)).sum();
        let u = beta(self.q, theta + self.n as f64 - self.q, rng);
        u * (t * pg + cells)
    }
}

/// One draw of `U_{q,θ+n-q} (μ_θ(g) + Σ_j G_{j,n} g(Y*_j))` with `Y` from
/// the Blackwell-MacQueen urn.
pub fn sample_rhs_eq18<R: Rng + ?Sized>(
    shape: &ShapeMeasure,
    q: f64,
    n: usize,
    g: &Functional,
    eps: f64,
    rng: &mut R,
) -> Result<f64> {
    Ok(MixtureSampler::new(shape, q, n, eps)?.draw(rng, g))
}

/// `T₁^p / (T₁^p + T_θ τ_p^p)`, distributed as `Beta(1, θ)`.
///
/// Since `(T₁/τ_p)^p` is standard exponential, the ratio is
/// `E/(E + T_θ)` in law. Computed as `1/(1 + T_θ (τ_p/T₁)^p)`.
pub fn sample_remark25_u<R: Rng + ?Sized>(theta: f64, p_stable: f64, rng: &mut R) -> Result<f64> {
    let draws = stable_form_draws(theta, p_stable, rng)?;
    let (t1, tt, tau) = (draws.u, draws.t, draws.stable.unwrap_or(1.0));
    Ok(1.0 / (1.0 + tt * (tau / t1).powf(p_stable)))
}

/// The same ratio with the stable variate entering unpowered,
/// `T₁^p / (T₁^p + T_θ τ_p)`. Its law is not `Beta(1, θ)`.
pub fn sample_stable_form_unpowered<R: Rng + ?Sized>(theta: f64, p_stable: f64, rng: &mut R) -> Result<f64> {
    let draws = stable_form_draws(theta, p_stable, rng)?;
    let (t1, tt, tau) = (draws.u, draws.t, draws.stable.unwrap_or(1.0));
    Ok(1.0 / (1.0 + tt * tau / t1.powf(p_stable)))
}

/// `T₁` in `u`, `T_θ` in `t`, `τ_p` in `stable`.
fn stable_form_draws<R: Rng + ?Sized>(theta: f64, p: f64, rng: &mut R) -> Result<AuxiliaryDraws> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "theta must be positive, got {theta}"
        )));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "stable index must lie in (0, 1), got {p}"
        )));
    }
    let t1 = gamma(1.0, rng);
    let tt = gamma(theta, rng);
    let tau = positive_stable(p, rng);
    Ok(AuxiliaryDraws {
        u: t1,
        t: tt,
        gammas: Vec::new(),
        locations: Vec::new(),
        stable: Some(tau),
    })
}

/// One draw of each side of `T_θ U_{α,q-α} + Σ_j G_j g(Y*_j) = T_{θ+n} U_{α,q-α}`,
/// with the urn of size `n` drawn from `shape`.
pub fn sample_constraint_sides<R: Rng + ?Sized>(
    shape: &ShapeMeasure,
    alpha: f64,
    q: f64,
    n: usize,
    g: &Functional,
    rng: &mut R,
) -> Result<(f64, f64)> {
    ensure(alpha > 0.0 && q - alpha > 0.0, "0 < alpha < q")?;
    let theta = shape.theta();
    let left = AuxiliaryDraws::sample(shape, alpha, q - alpha, theta, n, rng)?;
    let lhs = left.t * left.u + left.cell_sum(g);
    let rhs = gamma(theta + n as f64, rng) * beta(alpha, q - alpha, rng);
    Ok((lhs, rhs))
}
