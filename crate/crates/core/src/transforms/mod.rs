//! Closed forms and quadratures for transforms of `P(g)`: the log-Laplace
//! exponent `ψ`, Laplace functionals, the Beta-weighted `u`-integrals and the
//! exact partition expansion.

pub mod quadrature;
pub mod special;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{ensure, Error, Result};
use crate::mc::{self, McEstimate};
use crate::measures::{BaseMeasure, Functional, ShapeMeasure};
use crate::rng::RngStream;
use crate::samplers::{enumerate_partitions, ewens_log_prob_sizes, urn_values};

pub use quadrature::{exp_sinh, jacobi_rule, tanh_sinh, QuadratureRule};
pub use special::{log_beta, log_gamma, reg_inc_beta, reg_inc_gamma};

/// Tolerance handed to the adaptive integrators.
pub const ADAPTIVE_TOL: f64 = 1e-13;

/// Largest expansion depth accepted by the exact partition expansion.
pub const MAX_EXACT_DEPTH: usize = 10;

/// Fails unless `1 + s·g(y) > 0` on the support of `h`.
fn check_domain(h: &BaseMeasure, g: &Functional, s: f64) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::Domain(format!("argument must be finite, got {s}")));
    }
    let (lo, hi) = g.range_on(h);
    if 1.0 + s * lo > 0.0 && 1.0 + s * hi > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "1 + {s}·g(y) must be positive on the support; g ranges over [{lo}, {hi}]"
        )))
    }
}

fn check_z(z: f64) -> Result<()> {
    if z >= 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "z must be a finite nonnegative number, got {z}"
        )))
    }
}

fn psi_unchecked(shape: &ShapeMeasure, g: &Functional, breaks: &[f64], z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    shape.theta() * shape.base().expect(breaks, |y| (z * g.eval(y)).ln_1p())
}

/// `ψ(z) = ∫ log(1 + z g(y)) θH(dy)`.
pub fn psi(shape: &ShapeMeasure, g: &Functional, z: f64) -> Result<f64> {
    check_domain(shape.base(), g, z)?;
    Ok(psi_unchecked(shape, g, &g.breakpoints(), z))
}

/// [`psi`] with the diffuse part integrated by tanh-sinh.
pub fn psi_adaptive(shape: &ShapeMeasure, g: &Functional, z: f64) -> Result<f64> {
    check_domain(shape.base(), g, z)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    Ok(shape.theta()
        * shape
            .base()
            .expect_adaptive(&g.breakpoints(), |y| (z * g.eval(y)).ln_1p(), ADAPTIVE_TOL))
}

/// Gamma-process Laplace functional `E[e^{-zμ(g)}] = e^{-ψ(z)}`.
pub fn laplace_gamma(shape: &ShapeMeasure, g: &Functional, z: f64) -> Result<f64> {
    Ok((-psi(shape, g, z)?).exp())
}

/// `∫ (1 + u z g(y))^{-e} H(dy)`.
pub fn moment_integral(h: &BaseMeasure, g: &Functional, z: f64, u: f64, e: u32) -> Result<f64> {
    if e == 0 {
        return Ok(1.0);
    }
    check_domain(h, g, u * z)?;
    let s = u * z;
    Ok(h.expect(&g.breakpoints(), |y| (1.0 + s * g.eval(y)).powi(-(e as i32))))
}

/// [`moment_integral`] with the diffuse part integrated by tanh-sinh.
pub fn moment_integral_adaptive(h: &BaseMeasure, g: &Functional, z: f64, u: f64, e: u32) -> Result<f64> {
    if e == 0 {
        return Ok(1.0);
    }
    check_domain(h, g, u * z)?;
    let s = u * z;
    Ok(h.expect_adaptive(
        &g.breakpoints(),
        |y| (1.0 + s * g.eval(y)).powi(-(e as i32)),
        ADAPTIVE_TOL,
    ))
}

/// `∫₀¹ e^{-ψ(uz)} Π_j (1 + u z g(Y*_j))^{-e_j} Beta(du | q, θ+n-q)` with the
/// `u`-nodes and `e^{-ψ(uz)}` precomputed, so it can be evaluated cheaply for
/// many `(Y*, e)`.
#[derive(Debug, Clone)]
pub struct Eq13Kernel {
    rule: Arc<QuadratureRule>,
    uz: Vec<f64>,
    laplace: Vec<f64>,
    n: usize,
}

impl Eq13Kernel {
    /// `shape` is the prior `θH`; `n` the number of observations.
    pub fn new(
        shape: &ShapeMeasure,
        g: &Functional,
        z: f64,
        q: f64,
        n: usize,
        m_quad: usize,
    ) -> Result<Self> {
        check_z(z)?;
        positive("q", q)?;
        ensure(shape.theta() + n as f64 - q > 0.0, "theta + n - q > 0")?;
        check_domain(shape.base(), g, z)?;
        let rule = jacobi_rule(q, shape.theta() + n as f64 - q, m_quad)?;
        let breaks = g.breakpoints();
        let uz: Vec<f64> = rule.nodes().iter().map(|u| u * z).collect();
        let laplace = uz
            .iter()
            .map(|&s| (-psi_unchecked(shape, g, &breaks, s)).exp())
            .collect();
        Ok(Self { rule, uz, laplace, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Value at distinct locations `uniques` with multiplicities `sizes`.
    pub fn value(&self, g: &Functional, uniques: &[f64], sizes: &[usize]) -> f64 {
        let gy: Vec<f64> = uniques.iter().map(|&y| g.eval(y)).collect();
        self.value_with(|s| {
            gy.iter()
                .zip(sizes)
                .map(|(&v, &e)| (1.0 + s * v).powi(-(e as i32)))
                .product()
        })
    }

    /// `Σ_k w_k e^{-ψ(u_k z)} f(u_k z)`.
    fn value_with<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.rule
            .weights()
            .iter()
            .zip(&self.uz)
            .zip(&self.laplace)
            .map(|((w, &s), l)| w * l * f(s))
            .sum()
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

/// Laplace functional of the posterior Beta-Gamma process given observations
/// with distinct values `uniques` and multiplicities `sizes`:
/// `∫₀¹ e^{-ψ(uz)} Π_j (1 + u z g(Y*_j))^{-e_j} Beta(du | q, θ+n-q)`,
/// with `ψ` taken under the prior shape `θH`.
#[allow(clippy::too_many_arguments)]
pub fn eq13_value(
    prior: &ShapeMeasure,
    uniques: &[f64],
    sizes: &[usize],
    q: f64,
    z: f64,
    g: &Functional,
    m_quad: usize,
) -> Result<f64> {
    if uniques.len() != sizes.len() {
        return Err(Error::InvalidParameter(format!(
            "{} locations but {} multiplicities",
            uniques.len(),
            sizes.len()
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidParameter("multiplicities must be positive".into()));
    }
    for &y in uniques {
        if 1.0 + z * g.eval(y) <= 0.0 {
            return Err(Error::Domain(format!("1 + z·g(y) must be positive at y = {y}")));
        }
    }
    let n = sizes.iter().sum();
    Ok(Eq13Kernel::new(prior, g, z, q, n, m_quad)?.value(g, uniques, sizes))
}

/// [`eq13_value`] reading `θH` and the observations from a posterior shape.
pub fn eq13_posterior(
    posterior: &ShapeMeasure,
    q: f64,
    z: f64,
    g: &Functional,
    m_quad: usize,
) -> Result<f64> {
    let prior = ShapeMeasure::new(posterior.prior_theta(), posterior.prior_base().clone())?;
    let (uniques, sizes): (Vec<f64>, Vec<usize>) = posterior
        .observations()
        .iter()
        .map(|&(y, c)| (y, c as usize))
        .unzip();
    eq13_value(&prior, &uniques, &sizes, q, z, g, m_quad)
}

/// Transform of order `q`, `∫₀¹ e^{-ψ(uz)} Beta(du | q, θ-q)`.
///
/// At `q = θ` the Beta weight degenerates and the value is `e^{-ψ(z)}`.
pub fn cs_eq15(shape: &ShapeMeasure, g: &Functional, z: f64, q: f64, m_quad: usize) -> Result<f64> {
    positive("q", q)?;
    if q == shape.theta() {
        check_z(z)?;
        return laplace_gamma(shape, g, z);
    }
    ensure(shape.theta() - q > 0.0, "theta - q > 0")?;
    Ok(Eq13Kernel::new(shape, g, z, q, 0, m_quad)?.value_with(|_| 1.0))
}

/// Order-one transform valid for every `θ > 0`:
/// `∫₀¹ e^{-ψ(uz)} [∫ H(dy)/(1 + u z g(y))] Beta(du | 1, θ)`.
pub fn cs_eq17(shape: &ShapeMeasure, g: &Functional, z: f64, m_quad: usize) -> Result<f64> {
    let kernel = Eq13Kernel::new(shape, g, z, 1.0, 1, m_quad)?;
    let h = shape.base();
    let breaks = g.breakpoints();
    Ok(kernel.value_with(|s| h.expect(&breaks, |y| 1.0 / (1.0 + s * g.eval(y)))))
}

/// How [`cs_partition_expansion`] averages over the urn.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum ExpansionMode {
    /// Sum over all set partitions weighted by the Ewens law; diffuse `H` only.
    Exact,
    /// Average of the posterior Laplace functional over urn draws.
    MonteCarlo { n_samples: usize, stream: RngStream },
}

/// Partition size profiles of `{1..n}` with their multiplicities.
type Profiles = Arc<Vec<(Vec<usize>, u64)>>;

fn profile_counts(n: usize) -> Result<Profiles> {
    static TABLE: OnceLock<Mutex<HashMap<usize, Profiles>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = table.lock().expect("profile table").get(&n) {
        return Ok(hit.clone());
    }
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    for p in enumerate_partitions(n)? {
        *counts.entry(p.size_profile()).or_insert(0) += 1;
    }
    let mut list: Vec<(Vec<usize>, u64)> = counts.into_iter().collect();
    list.sort();
    let list = Arc::new(list);
    table.lock().expect("profile table").insert(n, list.clone());
    Ok(list)
}

/// Transform of order `q` by the depth-`n` mixture over the urn,
/// valid whenever `θ + n - q > 0`.
///
/// Exact mode evaluates
/// `Σ_p π(p|θ) ∫₀¹ e^{-ψ(uz)} Π_j [∫ (1 + u z g)^{-e_j} dH] Beta(du | q, θ+n-q)`.
#[allow(clippy::too_many_arguments)]
pub fn cs_partition_expansion(
    shape: &ShapeMeasure,
    g: &Functional,
    z: f64,
    q: f64,
    n: usize,
    mode: &ExpansionMode,
    m_quad: usize,
) -> Result<McEstimate> {
    let kernel = Eq13Kernel::new(shape, g, z, q, n, m_quad)?;
    if n == 0 {
        return Ok(McEstimate::exact(kernel.value_with(|_| 1.0)));
    }
    match mode {
        ExpansionMode::Exact => {
            if !shape.base().is_diffuse() {
                return Err(Error::Precondition(
                    "exact partition expansion needs a base measure without atoms".into(),
                ));
            }
            if n > MAX_EXACT_DEPTH {
                return Err(Error::Precondition(format!("n <= {MAX_EXACT_DEPTH}")));
            }
            let theta = shape.theta();
            let profiles: Vec<(Vec<usize>, f64)> = profile_counts(n)?
                .iter()
                .map(|(sizes, count)| {
                    let w = *count as f64 * ewens_log_prob_sizes(sizes, theta)?.exp();
                    Ok((sizes.clone(), w))
                })
                .collect::<Result<_>>()?;
            let h = shape.base();
            let breaks = g.breakpoints();
            let mut moments = vec![0.0; n + 1];
            Ok(McEstimate::exact(kernel.value_with(|s| {
                for (e, m) in moments.iter_mut().enumerate().skip(1) {
                    *m = h.expect(&breaks, |y| (1.0 + s * g.eval(y)).powi(-(e as i32)));
                }
                profiles
                    .iter()
                    .map(|(sizes, w)| w * sizes.iter().map(|&e| moments[e]).product::<f64>())
                    .sum()
            })))
        }
        ExpansionMode::MonteCarlo { n_samples, stream } => Ok(mc::estimate(*n_samples, stream, |rng| {
            let values = urn_values(shape, n, rng);
            let (uniques, sizes) = tally(&values);
            kernel.value(g, &uniques, &sizes)
        })),
    }
}

/// Distinct values in order of appearance with multiplicities.
pub(crate) fn tally(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut uniques: Vec<f64> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for &v in values {
        match uniques.iter().position(|u| u.to_bits() == v.to_bits()) {
            Some(j) => sizes[j] += 1,
            None => {
                uniques.push(v);
                sizes.push(1);
            }
        }
    }
    (uniques, sizes)
}

/// `(1+v)^{-θ} exp(-∫ log[1 + (w/(1+v)) g(y)] θH(dy))`, the joint Laplace
/// transform of `(T, μ(g))` at `(v, w)`.
pub fn eq11_rhs(shape: &ShapeMeasure, g: &Functional, v: f64, w: f64) -> Result<f64> {
    if !(v > -1.0 && v.is_finite()) {
        return Err(Error::Domain(format!("v must exceed -1, got {v}")));
    }
    let s = w / (1.0 + v);
    check_domain(shape.base(), g, s)?;
    let log = -shape.theta() * v.ln_1p() - psi_unchecked(shape, g, &g.breakpoints(), s);
    Ok(log.exp())
}

/// `(1/Γ(q)) ∫₀^∞ v^{q-1} e^{-vT} dv` by exp-sinh quadrature; equals `T^{-q}`.
pub fn gamma_identity_check(t: f64, q: f64) -> Result<f64> {
    positive("T", t)?;
    positive("q", q)?;
    let lg = log_gamma(q)?;
    Ok(exp_sinh(
        |v, lv| ((q - 1.0) * lv - v * t - lg).exp(),
        ADAPTIVE_TOL,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::integrability_value;

    fn shape(theta: f64, h: &str) -> ShapeMeasure {
        ShapeMeasure::new(theta, h.parse().unwrap()).unwrap()
    }

    fn id() -> Functional {
        Functional::identity()
    }

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn psi_examples() {
        let coin = shape(1.0, "0.5*delta(0)+0.5*delta(1)");
        assert_eq!(psi(&coin, &id(), 0.0).unwrap(), 0.0);
        assert!((psi(&coin, &id(), 3.0).unwrap() - 0.5 * 4f64.ln()).abs() < 1e-15);
        let one = shape(2.0, "delta(1)");
        assert!((psi(&one, &id(), 1.0).unwrap() - 2.0 * LN2).abs() < 1e-15);
        // ψ(1) under uniform equals the integrability value 2 ln 2 - 1.
        let u = shape(1.0, "uniform(0,1)");
        assert!((psi(&u, &id(), 1.0).unwrap() - (2.0 * LN2 - 1.0)).abs() < 1e-14);
        assert!((psi(&u, &id(), 1.0).unwrap() - integrability_value(&u, &id())).abs() < 1e-15);
        let neg: Functional = "affine(-1,0)".parse().unwrap();
        assert!(psi(&u, &neg, 1.0).is_err());
        assert!(psi(&u, &neg, 0.5).is_ok());
    }

    #[test]
    fn laplace_examples() {
        let coin = shape(1.0, "0.5*delta(0)+0.5*delta(1)");
        assert_eq!(laplace_gamma(&coin, &id(), 0.0).unwrap(), 1.0);
        assert!((laplace_gamma(&coin, &id(), 3.0).unwrap() - 0.5).abs() < 1e-15);
        let c = Functional::constant(0.7).unwrap();
        let u = shape(1.6, "uniform(0,1)");
        let want = (1.0f64 + 2.0 * 0.7).powf(-1.6);
        assert!((laplace_gamma(&u, &c, 2.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn moment_integral_examples() {
        let u: BaseMeasure = "uniform(0,1)".parse().unwrap();
        let one: BaseMeasure = "delta(1)".parse().unwrap();
        assert_eq!(moment_integral(&u, &id(), 5.0, 0.3, 0).unwrap(), 1.0);
        assert!((moment_integral(&one, &id(), 1.0, 1.0, 2).unwrap() - 0.25).abs() < 1e-16);
        assert!((moment_integral(&u, &id(), 1.0, 1.0, 1).unwrap() - LN2).abs() < 1e-15);
        let neg: Functional = "affine(-2,0)".parse().unwrap();
        assert!(moment_integral(&u, &neg, 1.0, 0.9, 1).is_err());
    }

    #[test]
    fn eq13_examples() {
        let u = shape(2.0, "uniform(0,1)");
        let g = id();
        let k = Eq13Kernel::new(&u, &g, 0.0, 1.0, 0, 64).unwrap();
        assert!((k.value(&g, &[], &[]) - 1.0).abs() < 1e-14);
        let v = eq13_value(&u, &[], &[], 1.0, 1.5, &g, 64).unwrap();
        assert_eq!(v, cs_eq15(&u, &g, 1.5, 1.0, 64).unwrap());
        let zero = shape(1.0, "delta(0)");
        for &z in &[0.5, 1.0, 7.0] {
            let v = eq13_value(&zero, &[0.0], &[1], 1.0, z, &g, 64).unwrap();
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(eq13_value(&zero, &[0.0], &[1], 2.0, 1.0, &g, 64).is_err());
        assert!(eq13_value(&zero, &[0.0, 1.0], &[1], 0.5, 1.0, &g, 64).is_err());
    }

    #[test]
    fn eq13_from_posterior_shape() {
        let prior = shape(1.0, "0.5*delta(0)+0.5*delta(1)");
        let post = crate::measures::posterior_shape(
            &prior,
            &crate::measures::ObservationSet::new(vec![1.0, 0.0, 1.0]),
        );
        let a = eq13_posterior(&post, 2.5, 0.8, &id(), 64).unwrap();
        let b = eq13_value(&prior, &[0.0, 1.0], &[1, 2], 2.5, 0.8, &id(), 64).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cs_eq15_examples() {
        let c = Functional::constant(1.0).unwrap();
        let u = shape(2.0, "uniform(0,1)");
        assert_eq!(cs_eq15(&u, &id(), 0.0, 1.0, 64).unwrap(), 1.0);
        // g ≡ 1 makes P(g) = 1, so the transform is (1 + z)^{-q} = 1/2; the
        // u-integral ∫₀¹ (1+u)^{-2} du agrees.
        let v = cs_eq15(&u, &c, 1.0, 1.0, 64).unwrap();
        let direct = tanh_sinh(|x, _, _| (1.0 + x).powi(-2), 0.0, 1.0, 1e-14);
        assert!((v - 0.5).abs() < 1e-14, "{v}");
        assert!((v - direct).abs() < 1e-14);
        assert!((v - 2.0 * (1.0 - LN2)).abs() > 0.1);
        // q = θ gives the Laplace functional.
        assert_eq!(
            cs_eq15(&u, &id(), 1.3, 2.0, 64).unwrap(),
            laplace_gamma(&u, &id(), 1.3).unwrap()
        );
        match cs_eq15(&shape(1.0, "uniform(0,1)"), &id(), 1.0, 2.0, 64) {
            Err(Error::Precondition(msg)) => assert_eq!(msg, "theta - q > 0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cs_eq17_reduces() {
        let coin = shape(1.0, "0.5*delta(0)+0.5*delta(1)");
        assert!((cs_eq17(&coin, &id(), 0.0, 64).unwrap() - 1.0).abs() < 1e-14);
        // θ = 1: order-one transform equals the Laplace functional.
        for &z in &[0.5, 1.0, 3.0, 10.0] {
            let a = cs_eq17(&coin, &id(), z, 64).unwrap();
            assert!((a - (1.0 + z).powf(-0.5)).abs() < 1e-12, "z={z}");
        }
        // θ > 1: agrees with the order-one Beta(1, θ-1) form.
        let u = shape(2.5, "uniform(0,1)");
        for &z in &[0.5, 3.0] {
            let a = cs_eq17(&u, &id(), z, 64).unwrap();
            let b = cs_eq15(&u, &id(), z, 1.0, 64).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn partition_expansion_n_invariance() {
        let u = shape(0.75, "uniform(0,1)");
        let g = id();
        let vals: Vec<f64> = (2..=5)
            .map(|n| {
                cs_partition_expansion(&u, &g, 1.0, 2.0, n, &ExpansionMode::Exact, 64)
                    .unwrap()
                    .mean
            })
            .collect();
        for v in &vals[1..] {
            assert!((v - vals[0]).abs() < 1e-8, "{vals:?}");
        }
        assert!(cs_partition_expansion(&u, &g, 1.0, 2.0, 1, &ExpansionMode::Exact, 64).is_err());
    }

    #[test]
    fn partition_expansion_chain() {
        let u = shape(2.3, "uniform(0,1)");
        let g = id();
        for &q in &[0.4, 1.0, 1.9] {
            let e15 = cs_eq15(&u, &g, 2.0, q, 64).unwrap();
            for n in 0..=4 {
                let e = cs_partition_expansion(&u, &g, 2.0, q, n, &ExpansionMode::Exact, 64)
                    .unwrap()
                    .mean;
                assert!((e - e15).abs() < 1e-10, "q={q} n={n}");
            }
        }
        // z = 0 gives 1.
        let one = cs_partition_expansion(&u, &g, 0.0, 3.0, 1, &ExpansionMode::Exact, 64).unwrap();
        assert!((one.mean - 1.0).abs() < 1e-13);
        // Gamma-process Laplace functional for every n at q = θ.
        let lg = laplace_gamma(&u, &g, 2.0).unwrap();
        for n in 1..=3 {
            let e = cs_partition_expansion(&u, &g, 2.0, 2.3, n, &ExpansionMode::Exact, 64).unwrap();
            assert!((e.mean - lg).abs() < 1e-10);
        }
    }

    #[test]
    fn partition_expansion_monte_carlo() {
        let u = shape(0.75, "uniform(0,1)");
        let g = id();
        let exact = cs_partition_expansion(&u, &g, 1.0, 2.0, 2, &ExpansionMode::Exact, 64).unwrap();
        let mode = ExpansionMode::MonteCarlo {
            n_samples: 20_000,
            stream: RngStream::new(30),
        };
        let est = cs_partition_expansion(&u, &g, 1.0, 2.0, 2, &mode, 64).unwrap();
        assert!((est.mean - exact.mean).abs() < 3.0 * est.std_error + 1e-12);
        assert!(cs_partition_expansion(
            &shape(1.0, "delta(0)"),
            &g,
            1.0,
            1.0,
            1,
            &ExpansionMode::Exact,
            64
        )
        .is_err());
    }

    #[test]
    fn eq11_examples() {
        let u = shape(1.4, "uniform(0,1)");
        assert_eq!(eq11_rhs(&u, &id(), 0.0, 0.0).unwrap(), 1.0);
        assert!((eq11_rhs(&u, &id(), 0.7, 0.0).unwrap() - 1.7f64.powf(-1.4)).abs() < 1e-15);
        let one = shape(1.0, "delta(1)");
        assert!((eq11_rhs(&one, &id(), 1.0, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(eq11_rhs(&one, &id(), -1.0, 2.0).is_err());
    }

    #[test]
    fn gamma_identity_grid() {
        for &(t, q) in &[
            (1.0, 1.0),
            (2.0, 1.0),
            (3.0, 0.5),
            (0.2, 0.3),
            (7.0, 4.5),
            (1.5, 2.2),
        ] {
            let v = gamma_identity_check(t, q).unwrap();
            let want = f64::powf(t, -q);
            assert!(((v - want) / want).abs() < 1e-8, "T={t} q={q}: {v} vs {want}");
        }
        assert!(gamma_identity_check(0.0, 1.0).is_err());
    }

    #[test]
    fn transforms_are_in_unit_interval_and_decreasing() {
        let shapes = [
            shape(0.5, "0.5*delta(0)+0.5*delta(1)"),
            shape(2.0, "uniform(0,1)"),
        ];
        let zs = [0.0, 0.25, 1.0, 4.0, 16.0];
        for s in &shapes {
            let mut prev15 = f64::INFINITY;
            let mut prev17 = f64::INFINITY;
            let mut prev_psi = -1.0;
            for &z in &zs {
                let p = psi(s, &id(), z).unwrap();
                assert!(p >= prev_psi);
                prev_psi = p;
                let a = cs_eq17(s, &id(), z, 64).unwrap();
                assert!(a > 0.0 && a <= 1.0 + 1e-15 && a <= prev17 + 1e-15);
                prev17 = a;
                if s.theta() > 0.3 {
                    let b = cs_eq15(s, &id(), z, 0.3, 64).unwrap();
                    assert!(b > 0.0 && b <= 1.0 + 1e-15 && b <= prev15 + 1e-15);
                    prev15 = b;
                }
            }
        }
    }

    #[test]
    fn doubling_the_order_is_stable() {
        let cases = [
            (shape(2.0, "uniform(0,1)"), 0.5),
            (shape(0.75, "arcsine"), 0.3),
            (shape(1.0, "0.5*delta(0)+0.5*delta(1)"), 0.9),
        ];
        for (s, q) in &cases {
            for &z in &[0.5, 3.0, 10.0] {
                let a = cs_eq15(s, &id(), z, *q, 64).unwrap();
                let b = cs_eq15(s, &id(), z, *q, 128).unwrap();
                assert!((a - b).abs() <= 1e-8);
                let a = cs_eq17(s, &id(), z, 64).unwrap();
                let b = cs_eq17(s, &id(), z, 128).unwrap();
                assert!((a - b).abs() <= 1e-8);
                let a = eq13_value(s, &[0.2, 0.9], &[2, 1], 2.0, z, &id(), 64).unwrap();
                let b = eq13_value(s, &[0.2, 0.9], &[2, 1], 2.0, z, &id(), 128).unwrap();
                assert!((a - b).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn gauss_and_adaptive_agree() {
        let s = shape(1.3, "0.3*beta(0.5,2.5)+0.7*delta(0.4)");
        let g: Functional = "indicator(0.2,0.6)+poly(0,1,-0.5)".parse().unwrap();
        for &z in &[0.1, 1.0, 5.0] {
            let a = psi(&s, &g, z).unwrap();
            let b = psi_adaptive(&s, &g, z).unwrap();
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
            for e in 1..4 {
                let a = moment_integral(s.base(), &g, z, 0.7, e).unwrap();
                let b = moment_integral_adaptive(s.base(), &g, z, 0.7, e).unwrap();
                assert!((a - b).abs() <= 1e-10 * b.abs());
            }
        }
    }
}
