//! The named identity checks. Each check resolves its parameter record
//! (defaults plus preconditions), then compares both sides of one identity.

use crate::error::{ensure, Error, Result};
use crate::mc::{self, MeanVar};
use crate::measures::{posterior_shape, BaseMeasure, Functional, ObservationSet, ShapeMeasure};
use crate::rng::RngStream;
use crate::samplers::{
    beta, default_n, gamma, sample_remark25_u, urn_values, AuxiliaryDraws, BetaGammaSampler,
    DirichletSampler, MixtureSampler,
};
use crate::transforms::{
    cs_eq15, cs_eq17, cs_partition_expansion, eq11_rhs, eq13_value, gamma_identity_check, jacobi_rule,
    laplace_gamma, log_gamma, reg_inc_beta, tally, Eq13Kernel, ExpansionMode,
};
use crate::{DEFAULT_EPS, DEFAULT_QUAD_ORDER};

use super::ks::{ks_threshold_one_sample, ks_threshold_two_sample, ks_two_sample, ks_vs_cdf};
use super::report::{CheckParams, CheckReport, GridPoint, Rule};
use super::{bg_laplace_mc_grid, cs_transform_mc_grid};

pub const DEFAULT_SAMPLES: usize = 100_000;
/// Smallest sample size accepted by the KS-based checks.
pub const MIN_KS_SAMPLES: usize = 10_000;

const COIN: &str = "0.5*delta(0)+0.5*delta(1)";

fn common_defaults() -> CheckParams {
    CheckParams {
        n_samples: Some(DEFAULT_SAMPLES),
        eps: Some(DEFAULT_EPS),
        quad_order: Some(DEFAULT_QUAD_ORDER),
        seed: Some(0),
        rhs_scale: Some(1.0),
        ..Default::default()
    }
}

fn base_defaults(theta: f64, base: &str, functional: &str) -> CheckParams {
    CheckParams {
        theta: Some(theta),
        base: Some(base.into()),
        functional: Some(functional.into()),
        ..Default::default()
    }
}

fn resolve(params: &CheckParams, defaults: CheckParams) -> CheckParams {
    params.clone().or(&defaults).or(&common_defaults())
}

fn req<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::parse(name, "required parameter is missing"))
}

/// Parsed, validated ingredients shared by the checks.
struct Setup {
    theta: f64,
    shape: ShapeMeasure,
    g: Functional,
    n_samples: usize,
    eps: f64,
    m: usize,
    scale: f64,
    stream: RngStream,
}

impl Setup {
    fn new(p: &CheckParams) -> Result<Self> {
        let theta = req(&p.theta, "theta")?;
        let base: BaseMeasure = req(&p.base, "base")?
            .parse()
            .map_err(|e: Error| Error::parse("base", e.to_string()))?;
        let g: Functional = req(&p.functional, "functional")?
            .parse()
            .map_err(|e: Error| Error::parse("functional", e.to_string()))?;
        let shape = ShapeMeasure::new(theta, base).map_err(|e| Error::parse("theta", e.to_string()))?;
        let eps = req(&p.eps, "eps")?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::parse("eps", format!("must lie in (0, 1), got {eps}")));
        }
        let n_samples = req(&p.n_samples, "n_samples")?;
        if n_samples == 0 {
            return Err(Error::parse("n_samples", "must be positive"));
        }
        let m = req(&p.quad_order, "quad_order")?;
        if m == 0 {
            return Err(Error::parse("quad_order", "must be positive"));
        }
        let scale = req(&p.rhs_scale, "rhs_scale")?;
        if !scale.is_finite() {
            return Err(Error::parse("rhs_scale", "must be finite"));
        }
        Ok(Self {
            theta,
            shape,
            g,
            n_samples,
            eps,
            m,
            scale,
            stream: RngStream::new(req(&p.seed, "seed")?),
        })
    }

    fn stderr(&self) -> Rule {
        Rule::StdErr {
            k: 3.0,
            eps: self.eps,
        }
    }

    fn ks_samples(&self) -> Result<()> {
        ensure(self.n_samples >= MIN_KS_SAMPLES, "n_samples >= 10000")
    }

    /// Fails unless `1 + z·g > 0` on the support for every `z`.
    fn z_grid(&self, p: &CheckParams) -> Result<Vec<f64>> {
        let zs = req(&p.z_grid, "z_grid")?;
        if zs.is_empty() {
            return Err(Error::parse("z_grid", "must not be empty"));
        }
        let (lo, hi) = self.g.range_on(self.shape.base());
        for &z in &zs {
            if !(z >= 0.0 && z.is_finite()) {
                return Err(Error::parse(
                    "z_grid",
                    format!("z must be finite and nonnegative, got {z}"),
                ));
            }
            ensure(
                1.0 + z * lo > 0.0 && 1.0 + z * hi > 0.0,
                "1 + z g(y) > 0 on the support",
            )?;
        }
        Ok(zs)
    }
}

fn positive(v: f64, name: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::parse(name, format!("must be positive, got {v}")))
    }
}

fn mean_se(m: &crate::mc::McEstimate) -> (f64, f64) {
    (m.mean, m.std_error)
}

fn exact(v: f64) -> (f64, f64) {
    (v, 0.0)
}

/// Mean, variance and the standard error of the sample variance.
fn variance_with_se(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mv: MeanVar = xs.iter().copied().collect();
    let mean = mv.mean();
    let var = mv.variance();
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    (mean, var, ((m4 - var * var).max(0.0) / n).sqrt())
}

// ---------------------------------------------------------------------------
// Order-θ transform against the Gamma-process Laplace functional.

pub(crate) fn prepare_eq2(params: &CheckParams) -> Result<CheckParams> {
    let p = resolve(
        params,
        CheckParams {
            z_grid: Some(vec![0.5, 1.0, 3.0, 10.0]),
            n_samples: Some(1_000_000),
            ..base_defaults(1.0, COIN, "id")
        },
    );
    let s = Setup::new(&p)?;
    s.z_grid(&p)?;
    Ok(p)
}

pub(crate) fn run_eq2(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let zs = s.z_grid(p)?;
    let lhs = cs_transform_mc_grid(
        &s.shape,
        &s.g,
        &zs,
        s.theta,
        s.n_samples,
        s.eps,
        &s.stream.child(0),
    )?;
    let mut points = Vec::new();
    for (z, l) in zs.iter().zip(&lhs) {
        let rhs = laplace_gamma(&s.shape, &s.g, *z)? * s.scale;
        points.push(GridPoint::new(
            format!("z={z}"),
            mean_se(l),
            exact(rhs),
            s.stderr(),
        ));
    }
    Ok(CheckReport::new("check_eq2", p.clone(), points))
}

/// `E[(1+zP(g))^{-θ}] = e^{-ψ(z)}`.
pub fn check_eq2(params: &CheckParams) -> Result<CheckReport> {
    run_eq2(&prepare_eq2(params)?)
}

// ---------------------------------------------------------------------------
// Transform of order q against the Beta-Gamma Laplace functional.

pub(crate) fn prepare_eq14(params: &CheckParams) -> Result<CheckParams> {
    let p = resolve(
        params,
        CheckParams {
            q: Some(0.5),
            theta: Some(2.0),
            z_grid: Some(vec![0.5, 1.0, 3.0]),
            ..base_defaults(2.0, COIN, "id")
        },
    );
    let s = Setup::new(&p)?;
    positive(req(&p.q, "q")?, "q")?;
    s.z_grid(&p)?;
    Ok(p)
}

pub(crate) fn run_eq14(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let zs = s.z_grid(p)?;
    let q = req(&p.q, "q")?;
    let theta = s.theta;
    let cs = cs_transform_mc_grid(&s.shape, &s.g, &zs, q, s.n_samples, s.eps, &s.stream.child(0))?;
    let bg = bg_laplace_mc_grid(
        &s.shape,
        theta - q,
        &s.g,
        &zs,
        s.n_samples,
        s.eps,
        &s.stream.child(1),
    )?;
    let expansion_n = default_n(theta, q);
    let expansion = if theta < q {
        let mode = if s.shape.base().is_diffuse() && expansion_n <= crate::transforms::MAX_EXACT_DEPTH {
            ExpansionMode::Exact
        } else {
            ExpansionMode::MonteCarlo {
                n_samples: s.n_samples,
                stream: s.stream.child(2),
            }
        };
        Some(mode)
    } else {
        None
    };
    let mut points = Vec::new();
    for (i, &z) in zs.iter().enumerate() {
        let scaled = |v: (f64, f64)| (v.0 * s.scale, v.1 * s.scale);
        points.push(GridPoint::new(
            format!("z={z} transform mc vs laplace mc"),
            mean_se(&cs[i]),
            scaled(mean_se(&bg[i])),
            s.stderr(),
        ));
        let mut quad = Vec::new();
        if theta >= q {
            quad.push(("order-q quadrature", exact(cs_eq15(&s.shape, &s.g, z, q, s.m)?)));
        }
        if q == 1.0 {
            quad.push(("order-one quadrature", exact(cs_eq17(&s.shape, &s.g, z, s.m)?)));
        }
        if let Some(mode) = &expansion {
            let e = cs_partition_expansion(&s.shape, &s.g, z, q, expansion_n, mode, s.m)?;
            quad.push(("partition expansion", mean_se(&e)));
        }
        for (name, value) in quad {
            let value = scaled(value);
            points.push(GridPoint::new(
                format!("z={z} transform mc vs {name}"),
                mean_se(&cs[i]),
                value,
                s.stderr(),
            ));
            points.push(GridPoint::new(
                format!("z={z} laplace mc vs {name}"),
                mean_se(&bg[i]),
                value,
                s.stderr(),
            ));
        }
    }
    Ok(CheckReport::new("check_eq14", p.clone(), points))
}

/// `E[(1+zP(g))^{-q}] = E[e^{-zμ(g)}]` with `μ` Beta-Gamma `(θH, θ-q)`.
pub fn check_eq14(params: &CheckParams) -> Result<CheckReport> {
    run_eq14(&prepare_eq14(params)?)
}

// ---------------------------------------------------------------------------
// Order-q quadrature for θ > q.

pub(crate) fn prepare_eq15(params: &CheckParams) -> Result<CheckParams> {
    let p = resolve(
        params,
        CheckParams {
            q: Some(1.0),
            z_grid: Some(vec![0.5, 1.0, 3.0]),
            ..base_defaults(2.0, COIN, "id")
        },
    );
    let s = Setup::new(&p)?;
    let q = req(&p.q, "q")?;
    positive(q, "q")?;
    ensure(s.theta - q > 0.0, "theta - q > 0")?;
    s.z_grid(&p)?;
    Ok(p)
}

pub(crate) fn run_eq15(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let zs = s.z_grid(p)?;
    let q = req(&p.q, "q")?;
    let mc = cs_transform_mc_grid(&s.shape, &s.g, &zs, q, s.n_samples, s.eps, &s.stream.child(0))?;
    let mut points = Vec::new();
    for (z, l) in zs.iter().zip(&mc) {
        let rhs = cs_eq15(&s.shape, &s.g, *z, q, s.m)? * s.scale;
        points.push(GridPoint::new(
            format!("z={z}"),
            mean_se(l),
            exact(rhs),
            s.stderr(),
        ));
    }
    Ok(CheckReport::new("check_eq15", p.clone(), points))
}

/// `E[(1+zP(g))^{-q}] = ∫ e^{-ψ(uz)} Beta(du|q, θ-q)` for `θ > q`.
pub fn check_eq15(params: &CheckParams) -> Result<CheckReport> {
    run_eq15(&prepare_eq15(params)?)
}

// ---------------------------------------------------------------------------
// Order-one quadrature, every θ.

pub(crate) fn prepare_eq17(params: &CheckParams) -> Result<CheckParams> {
    let p = resolve(
        params,
        CheckParams {
            z_grid: Some(vec![0.5, 1.0, 3.0]),
            ..base_defaults(0.5, COIN, "id")
        },
    );
    let s = Setup::new(&p)?;
    s.z_grid(&p)?;
    Ok(p)
}

pub(crate) fn run_eq17(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let zs = s.z_grid(p)?;
    let mc = cs_transform_mc_grid(&s.shape, &s.g, &zs, 1.0, s.n_samples, s.eps, &s.stream.child(0))?;
    let mut points = Vec::new();
    for (z, l) in zs.iter().zip(&mc) {
        let rhs = cs_eq17(&s.shape, &s.g, *z, s.m)? * s.scale;
        points.push(GridPoint::new(
            format!("z={z}"),
            mean_se(l),
            exact(rhs),
            s.stderr(),
        ));
    }
    Ok(CheckReport::new("check_eq17", p.clone(), points))
}

/// `E[(1+zP(g))^{-1}] = ∫ e^{-ψ(uz)} ∫ H(dy)/(1+uzg(y)) Beta(du|1, θ)`.
pub fn check_eq17(params: &CheckParams) -> Result<CheckReport> {
    run_eq17(&prepare_eq17(params)?)
}

// ---------------------------------------------------------------------------
// Prior Beta-Gamma Laplace functional as a mixture of posterior ones.

pub(crate) fn prepare_eq10(params: &CheckParams) -> Result<CheckParams> {
    let p = resolve(
        params,
        CheckParams {
            d: Some(0.0),
            n: Some(1),
            z_grid: Some(vec![0.5, 1.0, 3.0]),
            ..base_defaults(1.0, COIN, "id")
        },
    );
    let s = Setup::new(&p)?;
    let d = req(&p.d, "d")?;
    let n = req(&p.n, "n")?;
    ensure(s.theta - d > 0.0, "theta - d > 0")?;
    ensure(n as f64 + d > 0.0, "n + d > 0")?;
    s.z_grid(&p)?;
    Ok(p)
}

pub(crate) fn run_eq10(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let zs = s.z_grid(p)?;
    let d = req(&p.d, "d")?;
    let n = req(&p.n, "n")?;
    let q = s.theta - d;
    let lhs = bg_laplace_mc_grid(&s.shape, d, &s.g, &zs, s.n_samples, s.eps, &s.stream.child(0))?;
    let kernels: Vec<Eq13Kernel> = zs
        .iter()
        .map(|&z| Eq13Kernel::new(&s.shape, &s.g, z, q, n, s.m))
        .collect::<Result<_>>()?;
    let shape = &s.shape;
    let g = &s.g;
    let rhs = mc::accumulate(s.n_samples, zs.len(), &s.stream.child(1), |rng, out| {
        let values = urn_values(shape, n, rng);
        let (uniques, sizes) = tally(&values);
        for (o, k) in out.iter_mut().zip(&kernels) {
            *o = k.value(g, &uniques, &sizes);
        }
    });
    let stream = s.stream.child(1);
    let mut points = Vec::new();
    for (i, z) in zs.iter().enumerate() {
        let r = rhs[i].estimate(&stream);
        points.push(GridPoint::new(
            format!("z={z}"),
            mean_se(&lhs[i]),
            (r.mean * s.scale, r.std_error * s.scale),
            s.stderr(),
        ));
    }
    let mut report = CheckReport::new("check_eq10", p.clone(), points);
    if d == 0.0 && n > 0 {
        report = report.with_note(format!(
            "d = 0: the posterior of the Gamma process given {n} observations is Beta-Gamma with parameter {n}, not a Gamma process"
        ));
    }
    Ok(report)
}

/// `E[e^{-zμ(g)}]` under Beta-Gamma `(θH, d)` equals the urn average of the
/// posterior Beta-Gamma `((θ+n)H_n, n+d)` Laplace functional.
pub fn check_eq10(params: &CheckParams) -> Result<CheckReport> {
    run_eq10(&prepare_eq10(params)?)
}

// ---------------------------------------------------------------------------
// Joint Laplace transform of (T, μ(g)).

pub(crate) fn prepare_eq11(params: &CheckParams) -> Result<CheckParams> {
    let p = resolve(
        params,
        CheckParams {
            vw_grid: Some(vec![[0.0, 0.0], [0.5, 0.0], [1.0, 2.0], [0.5, 1.5], [2.0, 0.5]]),
            ..base_defaults(1.0, "delta(1)", "id")
        },
    );
    let s = Setup::new(&p)?;
    let grid = req(&p.vw_grid, "vw_grid")?;
    if grid.is_empty() {
        return Err(Error::parse("vw_grid", "must not be empty"));
    }
    for &[v, w] in &grid {
        ensure(v >= 0.0 && w >= 0.0, "v >= 0 and w >= 0")?;
        eq11_rhs(&s.shape, &s.g, v, w)?;
    }
    Ok(p)
}

pub(crate) fn run_eq11(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let grid = req(&p.vw_grid, "vw_grid")?;
    let sampler = BetaGammaSampler::new(&s.shape, 0.0, s.eps)?;
    let g = &s.g;
    let grid_ref = &grid;
    let stream = s.stream.child(0);
    let acc = mc::accumulate(s.n_samples, grid.len(), &stream, |rng, out| {
        let (t, pg) = sampler.mass_and_mean(rng, g);
        for (o, &[v, w]) in out.iter_mut().zip(grid_ref) {
            *o = (-(v * t + w * t * pg)).exp();
        }
    });
    let mut points = Vec::new();
    for (a, &[v, w]) in acc.iter().zip(&grid) {
        let rhs = eq11_rhs(&s.shape, &s.g, v, w)? * s.scale;
        points.push(GridPoint::new(
            format!("v={v} w={w}"),
            mean_se(&a.estimate(&stream)),
            exact(rhs),
            s.stderr(),
        ));
    }
    Ok(CheckReport::new("check_eq11", p.clone(), points))
}

/// `E[e^{-(vT + wμ(g))}] = (1+v)^{-θ} e^{-ψ(w/(1+v))}`.
pub fn check_eq11(params: &CheckParams) -> Result<CheckReport> {
    run_eq11(&prepare_eq11(params)?)
}

// ---------------------------------------------------------------------------
// Posterior Gamma-process transform against the posterior Laplace functional.

struct PosteriorRatioInputs {
    atoms: Vec<f64>,
    sizes: Vec<usize>,
    q: f64,
    n: usize,
}

fn posterior_ratio_inputs(p: &CheckParams, theta: f64) -> Result<PosteriorRatioInputs> {
    let atoms = req(&p.atoms, "atoms")?;
    let sizes = req(&p.sizes, "sizes")?;
    if atoms.len() != sizes.len() {
        return Err(Error::parse("sizes", "must have one entry per atom"));
    }
    if sizes.contains(&0) {
        return Err(Error::parse("sizes", "multiplicities must be positive"));
    }
    for (i, a) in atoms.iter().enumerate() {
        if atoms[..i].iter().any(|b| b.to_bits() == a.to_bits()) {
            return Err(Error::parse("atoms", "locations must be distinct"));
        }
    }
    let q = req(&p.q, "q")?;
    positive(q, "q")?;
    let n: usize = sizes.iter().sum();
    ensure(theta + n as f64 - q > 0.0, "theta + n - q > 0")?;
    Ok(PosteriorRatioInputs { atoms, sizes, q, n })
}

pub(crate) fn prepare_eq12(params: &CheckParams) -> Result<CheckParams> {
    let p = resolve(
        params,
        CheckParams {
            q: Some(1.0),
            atoms: Some(Vec::new()),
            sizes: Some(Vec::new()),
            z_grid: Some(vec![0.0, 0.5, 1.0, 3.0]),
            ..base_defaults(2.0, "uniform(0,1)", "id")
        },
    );
    let s = Setup::new(&p)?;
    let inputs = posterior_ratio_inputs(&p, s.theta)?;
    let zs = s.z_grid(&p)?;
    for &z in &zs {
        eq13_value(&s.shape, &inputs.atoms, &inputs.sizes, inputs.q, z, &s.g, s.m)?;
    }
    Ok(p)
}

pub(crate) fn run_eq12(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let zs = s.z_grid(p)?;
    let PosteriorRatioInputs { atoms, sizes, q, n } = posterior_ratio_inputs(p, s.theta)?;
    let values: Vec<f64> = atoms
        .iter()
        .zip(&sizes)
        .flat_map(|(&y, &e)| std::iter::repeat_n(y, e))
        .collect();
    let post = posterior_shape(&s.shape, &ObservationSet::new(values));
    let total = s.theta + n as f64;
    let log_ratio = log_gamma(total)? - log_gamma(total - q)?;
    let sampler = BetaGammaSampler::new(&post, 0.0, s.eps)?;
    let g = &s.g;
    let zs_ref = &zs;
    let stream = s.stream.child(0);
    let k = zs.len();
    // First k slots: the literal average. Last k: the same average with T
    // integrated out, E[(T(1 + zP(g)))^{-q} | P] = Γ(θ+n-q)/Γ(θ+n) (1 + zP(g))^{-q}.
    let acc = mc::accumulate(s.n_samples, 2 * k, &stream, |rng, out| {
        let (t, pg) = sampler.mass_and_mean(rng, g);
        for (i, &z) in zs_ref.iter().enumerate() {
            out[i] = (log_ratio - q * (t + z * t * pg).ln()).exp();
            out[k + i] = (-q * (1.0 + z * pg).ln()).exp();
        }
    });
    // E[T^{-2q}] is finite only for θ + n > 2q.
    let literal = total > 2.0 * q;
    let mut points = Vec::new();
    let mut notes = Vec::new();
    for (i, &z) in zs.iter().enumerate() {
        let rhs = eq13_value(&s.shape, &atoms, &sizes, q, z, &s.g, s.m)? * s.scale;
        let lit = acc[i].estimate(&stream);
        let lhs = if literal {
            lit
        } else {
            notes.push(format!(
                "z={z}: literal estimate {:.6} has unbounded variance; verdict uses the estimator with T integrated out",
                lit.mean
            ));
            acc[k + i].estimate(&stream)
        };
        points.push(GridPoint::new(
            format!("z={z}"),
            mean_se(&lhs),
            exact(rhs),
            s.stderr(),
        ));
    }
    let mut report = CheckReport::new("check_eq12", p.clone(), points);
    for note in notes {
        report = report.with_note(note);
    }
    Ok(report)
}

/// `Γ(θ+n)/Γ(θ+n-q) E[(T + zμ(g))^{-q}]` under the posterior Gamma process
/// equals the posterior Beta-Gamma Laplace functional.
pub fn check_eq12(params: &CheckParams) -> Result<CheckReport> {
    run_eq12(&prepare_eq12(params)?)
}

// ---------------------------------------------------------------------------
// Exact partition expansion across depths.

pub(crate) fn prepare_partition_invariance(params: &CheckParams) -> Result<CheckParams> {
    let p = resolve(
        params,
        CheckParams {
            q: Some(2.0),
            n_list: Some(vec![2, 3, 4]),
            z_grid: Some(vec![1.0]),
            ..base_defaults(0.75, "uniform(0,1)", "id")
        },
    );
    let s = Setup::new(&p)?;
    let q = req(&p.q, "q")?;
    positive(q, "q")?;
    ensure(s.shape.base().is_diffuse(), "base measure has no atoms")?;
    let ns = req(&p.n_list, "n_list")?;
    if ns.is_empty() {
        return Err(Error::parse("n_list", "must not be empty"));
    }
    for &n in &ns {
        ensure(n <= crate::transforms::MAX_EXACT_DEPTH, "n <= 10")?;
        ensure(s.theta + n as f64 - q > 0.0, "theta + n - q > 0")?;
    }
    s.z_grid(&p)?;
    Ok(p)
}

pub(crate) fn run_partition_invariance(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let zs = s.z_grid(p)?;
    let q = req(&p.q, "q")?;
    let ns = req(&p.n_list, "n_list")?;
    let mc = cs_transform_mc_grid(&s.shape, &s.g, &zs, q, s.n_samples, s.eps, &s.stream.child(0))?;
    let tol = Rule::Absolute { tol: 1e-8 };
    let mut points = Vec::new();
    for (i, &z) in zs.iter().enumerate() {
        let values: Vec<f64> = ns
            .iter()
            .map(|&n| {
                cs_partition_expansion(&s.shape, &s.g, z, q, n, &ExpansionMode::Exact, s.m).map(|e| e.mean)
            })
            .collect::<Result<_>>()?;
        let reference = values[0];
        for (n, v) in ns.iter().zip(&values).skip(1) {
            points.push(GridPoint::new(
                format!("z={z} n={n} vs n={}", ns[0]),
                exact(*v),
                exact(reference * s.scale),
                tol,
            ));
        }
        if s.theta > q {
            let e = cs_eq15(&s.shape, &s.g, z, q, s.m)?;
            points.push(GridPoint::new(
                format!("z={z} order-q quadrature"),
                exact(reference),
                exact(e * s.scale),
                tol,
            ));
        }
        if q == 1.0 {
            let e = cs_eq17(&s.shape, &s.g, z, s.m)?;
            points.push(GridPoint::new(
                format!("z={z} order-one quadrature"),
                exact(reference),
                exact(e * s.scale),
                tol,
            ));
        }
        points.push(GridPoint::new(
            format!("z={z} transform mc"),
            mean_se(&mc[i]),
            exact(reference * s.scale),
            s.stderr(),
        ));
    }
    Ok(CheckReport::new("check_partition_invariance", p.clone(), points))
}

/// The exact partition expansion does not depend on the depth `n`.
pub fn check_partition_invariance(params: &CheckParams) -> Result<CheckReport> {
    run_partition_invariance(&prepare_partition_invariance(params)?)
}

// ---------------------------------------------------------------------------
// Distributional identities for the Beta-Gamma process.

fn ks_two(label: &str, xs: &[f64], ys: &[f64]) -> Result<GridPoint> {
    let d = ks_two_sample(xs, ys)?;
    Ok(GridPoint::ks(
        label,
        d,
        ks_threshold_two_sample(xs.len(), ys.len()),
    ))
}

/// Two-sample KS between Beta-Gamma `(θH, θ-q)` functionals and the
/// mixture `U_{q,θ+n-q}(μ_θ(g) + Σ_j G_j g(Y*_j))`.
fn mixture_vs_beta_gamma(s: &Setup, q: f64, n: usize) -> Result<GridPoint> {
    let bg = BetaGammaSampler::new(&s.shape, s.theta - q, s.eps)?;
    let mix = MixtureSampler::new(&s.shape, q, n, s.eps)?;
    let g = &s.g;
    let xs = mc::draws(s.n_samples, &s.stream.child(0), |rng| bg.functional(rng, g));
    let ys = mc::draws(s.n_samples, &s.stream.child(1), |rng| mix.draw(rng, g) * s.scale);
    ks_two(&format!("beta-gamma vs mixture q={q} n={n}"), &xs, &ys)
}

pub(crate) fn prepare_eq18(params: &CheckParams) -> Result<CheckParams> {
    let mut p = resolve(
        params,
        CheckParams {
            q: Some(1.0),
            ..base_defaults(2.0, "uniform(0,1)", "id")
        },
    );
    let s = Setup::new(&p)?;
    s.ks_samples()?;
    let q = req(&p.q, "q")?;
    positive(q, "q")?;
    let n = *p.n.get_or_insert(default_n(s.theta, q));
    ensure(s.theta + n as f64 - q > 0.0, "theta + n - q > 0")?;
    Ok(p)
}

pub(crate) fn run_eq18(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let point = mixture_vs_beta_gamma(&s, req(&p.q, "q")?, req(&p.n, "n")?)?;
    Ok(CheckReport::new("check_eq18", p.clone(), vec![point]))
}

/// `μ_{θ,θ-q} = U_{q,θ+n-q} μ_θ + U_{q,θ+n-q} Σ_j G_{j,n} δ_{Y*_j}` in law.
pub fn check_eq18(params: &CheckParams) -> Result<CheckReport> {
    run_eq18(&prepare_eq18(params)?)
}

pub(crate) fn prepare_eq19(params: &CheckParams) -> Result<CheckParams> {
    let mut p = resolve(params, base_defaults(1.0, "uniform(0,1)", "id"));
    p.q = Some(1.0);
    p.n = Some(1);
    Setup::new(&p)?.ks_samples()?;
    Ok(p)
}

pub(crate) fn run_eq19(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let point = mixture_vs_beta_gamma(&s, 1.0, 1)?;
    Ok(CheckReport::new("check_eq19", p.clone(), vec![point]))
}

/// `μ_{θ,θ-1} = U_{1,θ}(μ_θ + T₁ δ_{Y₁})` in law.
pub fn check_eq19(params: &CheckParams) -> Result<CheckReport> {
    run_eq19(&prepare_eq19(params)?)
}

pub(crate) fn prepare_eq20(params: &CheckParams) -> Result<CheckParams> {
    let mut p = resolve(params, base_defaults(1.0, "uniform(0,1)", "id"));
    p.q = p.theta;
    p.n = Some(1);
    Setup::new(&p)?.ks_samples()?;
    Ok(p)
}

pub(crate) fn run_eq20(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let point = mixture_vs_beta_gamma(&s, s.theta, 1)?;
    Ok(CheckReport::new("check_eq20", p.clone(), vec![point]))
}

/// `μ_θ = U_{θ,1}(μ_θ + T₁ δ_{Y₁})` in law.
pub fn check_eq20(params: &CheckParams) -> Result<CheckReport> {
    run_eq20(&prepare_eq20(params)?)
}

pub(crate) fn prepare_eq21(params: &CheckParams) -> Result<CheckParams> {
    let mut p = resolve(
        params,
        CheckParams {
            q: Some(2.0),
            ..base_defaults(1.0, COIN, "indicator(0.5,1.5)")
        },
    );
    let s = Setup::new(&p)?;
    s.ks_samples()?;
    let q = req(&p.q, "q")?;
    positive(q, "q")?;
    p.n.get_or_insert(default_n(s.theta, q));
    Ok(p)
}

/// `θH(A)` when `H` is atomic and `g` is the indicator of `A` on its atoms.
fn atomic_indicator_mass(s: &Setup) -> Option<f64> {
    let h = s.shape.base();
    if !h.is_atomic() {
        return None;
    }
    let mut mass = 0.0;
    for atom in h.atoms() {
        match s.g.eval(atom.location) {
            1.0 => mass += atom.prob,
            0.0 => {}
            _ => return None,
        }
    }
    let a = s.theta * mass;
    (a > 0.0 && a < s.theta).then_some(a)
}

pub(crate) fn run_eq21(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let q = req(&p.q, "q")?;
    let n = req(&p.n, "n")?;
    let theta = s.theta;
    let bg = BetaGammaSampler::new(&s.shape, theta - q, s.eps)?;
    let g = &s.g;
    let xs = mc::draws(s.n_samples, &s.stream.child(0), |rng| bg.functional(rng, g));

    let mix = MixtureSampler::new(&s.shape, q, n, s.eps)?;
    let ys = mc::draws(s.n_samples, &s.stream.child(1), |rng| mix.draw(rng, g) * s.scale);
    let mut points = vec![ks_two(&format!("T_q P(g) vs mixture n={n}"), &xs, &ys)?];

    if let Some(a) = atomic_indicator_mass(&s) {
        let ws = mc::draws(s.n_samples, &s.stream.child(2), |rng| {
            gamma(q, rng) * beta(a, theta - a, rng) * s.scale
        });
        points.push(ks_two("T_q P(g) vs T_q U_{a,theta-a}", &xs, &ws)?);
    }

    // E[P(g)] = H(g), E[P(g)²] = (H(g²) + θ H(g)²)/(θ+1).
    let breaks = g.breakpoints();
    let hg = s.shape.base().expect(&breaks, |y| g.eval(y));
    let hg2 = s.shape.base().expect(&breaks, |y| g.eval(y).powi(2));
    let m1 = q * hg;
    let m2 = q * (q + 1.0) * (hg2 + theta * hg * hg) / (theta + 1.0);
    let first: MeanVar = xs.iter().copied().collect();
    let second: MeanVar = xs.iter().map(|x| x * x).collect();
    let rule = Rule::StdErr { k: 4.0, eps: s.eps };
    points.push(GridPoint::new(
        "first moment",
        (first.mean(), first.std_error()),
        exact(m1 * s.scale),
        rule,
    ));
    points.push(GridPoint::new(
        "second moment",
        (second.mean(), second.std_error()),
        exact(m2 * s.scale * s.scale),
        rule,
    ));
    Ok(CheckReport::new("check_eq21", p.clone(), points))
}

/// `μ_{θ,θ-q} = T_q P_θ` in law.
pub fn check_eq21(params: &CheckParams) -> Result<CheckReport> {
    run_eq21(&prepare_eq21(params)?)
}

// ---------------------------------------------------------------------------
// Arcsine base measure.

fn require_arcsine(s: &Setup) -> Result<()> {
    ensure(
        *s.shape.base() == BaseMeasure::arcsine() && s.g == Functional::identity(),
        "base = arcsine and functional = id",
    )
}

pub(crate) fn prepare_prop24(params: &CheckParams) -> Result<CheckParams> {
    let p = resolve(
        params,
        CheckParams {
            z_grid: Some(vec![0.5, 1.0, 3.0]),
            ..base_defaults(1.0, "arcsine", "id")
        },
    );
    let s = Setup::new(&p)?;
    s.ks_samples()?;
    require_arcsine(&s)?;
    s.z_grid(&p)?;
    Ok(p)
}

pub(crate) fn run_prop24(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let zs = s.z_grid(p)?;
    let theta = s.theta;
    let a = theta + 0.5;
    let g = &s.g;
    let dirichlet = DirichletSampler::new(&s.shape, s.eps)?;
    let xs = mc::draws(s.n_samples, &s.stream.child(0), |rng| {
        dirichlet.functional(rng, g)
    });
    let ks = ks_vs_cdf(&xs, |x| {
        reg_inc_beta(a, a, (x / s.scale).clamp(0.0, 1.0)).expect("valid beta parameters")
    })?;
    let mut points = vec![GridPoint::ks(
        format!("P(g) vs Beta({a},{a})"),
        ks,
        ks_threshold_one_sample(xs.len()),
    )];
    let (mean, var, var_se) = variance_with_se(&xs);
    let mv: MeanVar = xs.iter().copied().collect();
    let rule4 = Rule::StdErr { k: 4.0, eps: s.eps };
    points.push(GridPoint::new(
        "mean",
        (mean, mv.std_error()),
        exact(0.5 * s.scale),
        rule4,
    ));
    points.push(GridPoint::new(
        "variance",
        (var, var_se),
        exact(s.scale * s.scale / (4.0 * (2.0 * theta + 2.0))),
        rule4,
    ));

    // Beta-Gamma with q = 2θ + 1 has μ(g) ~ Gamma(θ + 1/2).
    let bg = bg_laplace_mc_grid(
        &s.shape,
        -(theta + 1.0),
        g,
        &zs,
        s.n_samples,
        s.eps,
        &s.stream.child(1),
    )?;
    let gp = bg_laplace_mc_grid(&s.shape, 0.0, g, &zs, s.n_samples, s.eps, &s.stream.child(2))?;
    let rule = jacobi_rule(a, a, s.m)?;
    for (i, &z) in zs.iter().enumerate() {
        let target = (1.0 + z).powf(-a) * s.scale;
        points.push(GridPoint::new(
            format!("z={z} beta-gamma laplace"),
            mean_se(&bg[i]),
            exact(target),
            s.stderr(),
        ));
        // E[e^{-z T_θ U}] = E[(1 + zU)^{-θ}] with U ~ Beta(θ+1/2, θ+1/2).
        let nested = rule.integrate(|u| (1.0 + z * u).powf(-theta));
        points.push(GridPoint::new(
            format!("z={z} gamma laplace mc vs beta mixture"),
            mean_se(&gp[i]),
            exact(nested * s.scale),
            s.stderr(),
        ));
        points.push(GridPoint::new(
            format!("z={z} gamma laplace closed form vs beta mixture"),
            exact(laplace_gamma(&s.shape, g, z)?),
            exact(nested * s.scale),
            Rule::Absolute { tol: 1e-8 },
        ));
    }
    Ok(CheckReport::new("check_prop24", p.clone(), points))
}

/// Arcsine `H`: `P_θ(id) ~ Beta(θ+1/2, θ+1/2)`.
pub fn check_prop24(params: &CheckParams) -> Result<CheckReport> {
    run_prop24(&prepare_prop24(params)?)
}

pub(crate) fn prepare_prop23(params: &CheckParams) -> Result<CheckParams> {
    let mut p = resolve(
        params,
        CheckParams {
            n: Some(1),
            ..base_defaults(1.0, "arcsine", "id")
        },
    );
    let s = Setup::new(&p)?;
    s.ks_samples()?;
    let theta = s.theta;
    let alpha = *p.alpha.get_or_insert(theta + 0.5);
    let q = *p.q.get_or_insert(2.0 * theta + 1.0);
    ensure(alpha > 0.0 && q - alpha > 0.0, "0 < alpha < q")?;
    ensure(req(&p.n, "n")? >= 1, "n >= 1")?;
    let (lo, hi) = s.g.range_on(s.shape.base());
    ensure(lo != 0.0 || hi != 0.0, "g does not vanish on the support")?;
    Ok(p)
}

pub(crate) fn run_prop23(p: &CheckParams) -> Result<CheckReport> {
    let s = Setup::new(p)?;
    let theta = s.theta;
    let alpha = req(&p.alpha, "alpha")?;
    let q = req(&p.q, "q")?;
    let n = req(&p.n, "n")?;
    let shape = &s.shape;
    let g = &s.g;
    let xs = mc::draws(s.n_samples, &s.stream.child(0), |rng| {
        let d = AuxiliaryDraws::sample(shape, alpha, q - alpha, theta, n, rng).expect("validated parameters");
        d.t * d.u + d.cell_sum(g)
    });
    let ys = mc::draws(s.n_samples, &s.stream.child(1), |rng| {
        gamma(theta + n as f64, rng) * beta(alpha, q - alpha, rng) * s.scale
    });
    let mut points = vec![ks_two(&format!("constraint n={n}"), &xs, &ys)?];
    if n >= 2 && shape.base().is_diffuse() {
        // P(all n urn values tied) = Γ(θ+1)Γ(n)/Γ(θ+n); 1/(θ+1) for n = 2.
        let want = (log_gamma(theta + 1.0)? + log_gamma(n as f64)? - log_gamma(theta + n as f64)?).exp();
        let stream = s.stream.child(2);
        let ties = mc::estimate(s.n_samples, &stream, |rng| {
            let v = urn_values(shape, n, rng);
            if v.iter().all(|y| y.to_bits() == v[0].to_bits()) {
                1.0
            } else {
                0.0
            }
        });
        points.push(GridPoint::new(
            "all urn values tied",
            mean_se(&ties),
            exact(want * s.scale),
            s.stderr(),
        ));
    }
    Ok(CheckReport::new("check_prop23", p.clone(), points))
}

/// `T_θ U_{α,q-α} + Σ_j G_j g(Y*_j) = T_{θ+n} U_{α,q-α}` in law.
pub fn check_prop23(params: &CheckParams) -> Result<CheckReport> {
    run_prop23(&prepare_prop23(params)?)
}

// ---------------------------------------------------------------------------
// Stable representation of U_{1,θ}.

pub(crate) fn prepare_remark25(params: &CheckParams) -> Result<CheckParams> {
    let p = resolve(
        params,
        CheckParams {
            p_grid: Some(vec![0.3, 0.5, 0.7]),
            theta_grid: Some(vec![0.5, 1.0, 2.0]),
            ..Default::default()
        },
    );
    let n = req(&p.n_samples, "n_samples")?;
    ensure(n >= MIN_KS_SAMPLES, "n_samples >= 10000")?;
    for &x in &req(&p.p_grid, "p_grid")? {
        ensure(x > 0.0 && x < 1.0, "0 < p < 1")?;
    }
    for &t in &req(&p.theta_grid, "theta_grid")? {
        positive(t, "theta_grid")?;
    }
    req(&p.seed, "seed")?;
    Ok(p)
}

pub(crate) fn run_remark25(p: &CheckParams) -> Result<CheckReport> {
    let n = req(&p.n_samples, "n_samples")?;
    let scale = req(&p.rhs_scale, "rhs_scale")?;
    let eps = req(&p.eps, "eps")?;
    let stream = RngStream::new(req(&p.seed, "seed")?);
    let mut points = Vec::new();
    let mut index = 0;
    for &ps in &req(&p.p_grid, "p_grid")? {
        for &theta in &req(&p.theta_grid, "theta_grid")? {
            let child = stream.child(index);
            index += 1;
            let xs = mc::draws(n, &child, |rng| {
                sample_remark25_u(theta, ps, rng).expect("validated parameters")
            });
            let ks = ks_vs_cdf(&xs, |x| {
                reg_inc_beta(1.0, theta, (x / scale).clamp(0.0, 1.0)).expect("valid beta parameters")
            })?;
            points.push(GridPoint::ks(
                format!("p={ps} theta={theta} vs Beta(1,{theta})"),
                ks,
                ks_threshold_one_sample(n),
            ));
            let mv: MeanVar = xs.iter().copied().collect();
            points.push(GridPoint::new(
                format!("p={ps} theta={theta} mean"),
                (mv.mean(), mv.std_error()),
                exact(scale / (1.0 + theta)),
                Rule::StdErr { k: 4.0, eps },
            ));
        }
    }
    Ok(CheckReport::new("check_remark25", p.clone(), points))
}

/// `T₁^p / (T₁^p + T_θ τ_p^p) ~ Beta(1, θ)`.
pub fn check_remark25(params: &CheckParams) -> Result<CheckReport> {
    run_remark25(&prepare_remark25(params)?)
}

// ---------------------------------------------------------------------------
// Gamma integral identity.

pub(crate) fn prepare_gamma_identity(params: &CheckParams) -> Result<CheckParams> {
    let p = resolve(
        params,
        CheckParams {
            gamma_grid: Some(vec![
                [1.0, 1.0],
                [2.0, 1.0],
                [3.0, 0.5],
                [0.5, 2.5],
                [10.0, 0.1],
                [0.1, 3.0],
            ]),
            ..Default::default()
        },
    );
    for &[t, q] in &req(&p.gamma_grid, "gamma_grid")? {
        positive(t, "gamma_grid")?;
        positive(q, "gamma_grid")?;
    }
    Ok(p)
}

pub(crate) fn run_gamma_identity(p: &CheckParams) -> Result<CheckReport> {
    let scale = req(&p.rhs_scale, "rhs_scale")?;
    let mut points = Vec::new();
    for &[t, q] in &req(&p.gamma_grid, "gamma_grid")? {
        let v = gamma_identity_check(t, q)?;
        points.push(GridPoint::new(
            format!("T={t} q={q}"),
            exact(v),
            exact(t.powf(-q) * scale),
            Rule::Relative { tol: 1e-8 },
        ));
    }
    Ok(CheckReport::new("check_gamma_identity", p.clone(), points))
}

/// `T^{-q} = Γ(q)^{-1} ∫₀^∞ v^{q-1} e^{-vT} dv`.
pub fn check_gamma_identity(params: &CheckParams) -> Result<CheckReport> {
    run_gamma_identity(&prepare_gamma_identity(params)?)
}
