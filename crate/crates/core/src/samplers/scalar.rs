//! Scalar draws: Gamma, Beta and positive stable variates.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};

/// Gamma(shape, 1) by Marsaglia-Tsang, boosted for `shape < 1` via
/// `G(a) = G(a + 1) U^{1/a}` (computed in log space).
pub(crate) fn gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let g = gamma(shape + 1.0, rng);
        let u: f64 = 1.0 - rng.random::<f64>();
        return (g.ln() + u.ln() / shape).exp();
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x: f64 = rng.sample(StandardNormal);
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

pub(crate) fn beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    if a == 1.0 && b == 1.0 {
        return rng.random();
    }
    if a == 1.0 {
        // 1 - U^{1/b}
        let u: f64 = 1.0 - rng.random::<f64>();
        return -(u.ln() / b).exp_m1();
    }
    if b == 1.0 {
        let u: f64 = 1.0 - rng.random::<f64>();
        return (u.ln() / a).exp();
    }
    let x = gamma(a, rng);
    let y = gamma(b, rng);
    x / (x + y)
}

/// Positive stable variate with `E[e^{-sτ}] = e^{-s^p}`, by Kanter's exact
/// representation `τ = (A(U)/E)^{(1-p)/p}`.
pub(crate) fn positive_stable<R: Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    let u = PI * (1.0 - rng.random::<f64>());
    let e: f64 = rng.sample(Exp1);
    let a = (p * u).sin().powf(p / (1.0 - p)) * ((1.0 - p) * u).sin() / u.sin().powf(1.0 / (1.0 - p));
    (a / e).powf((1.0 - p) / p)
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

/// `T_a`: Gamma with shape `a` and unit scale.
pub fn sample_gamma<R: Rng + ?Sized>(a: f64, rng: &mut R) -> Result<f64> {
    check_positive("gamma shape", a)?;
    Ok(gamma(a, rng))
}

/// `U_{a,b}`: Beta(a, b).
pub fn sample_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    check_positive("beta parameter a", a)?;
    check_positive("beta parameter b", b)?;
    Ok(beta(a, b, rng))
}

/// `τ_p`, a positive stable variate of index `0 < p < 1`.
pub fn sample_positive_stable<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "stable index must lie in (0, 1), got {p}"
        )));
    }
    Ok(positive_stable(p, rng))
}
