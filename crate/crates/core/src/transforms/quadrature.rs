//! Quadrature rules.
//!
//! * Gauss-Jacobi rules for the normalized Beta(a, b) weight on (0, 1), built
//!   with Golub-Welsch and cached per `(a, b, m)`.
//! * Double-exponential (tanh-sinh / exp-sinh) integrators with level
//!   refinement. These share nothing with the Gauss rules and serve as the
//!   independent route for validating them.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};

/// Nodes and weights integrating against Beta(a, b)(du) on (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ f(u) Beta(du | a, b)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(u))
            .sum()
    }
}

type RuleKey = (u64, u64, usize);

fn cache() -> &'static RwLock<HashMap<RuleKey, Arc<QuadratureRule>>> {
    static RULES: OnceLock<RwLock<HashMap<RuleKey, Arc<QuadratureRule>>>> = OnceLock::new();
    RULES.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Gauss rule of order `m` for the Beta(a, b) weight; exact for polynomials of
/// degree at most `2m - 1`.
pub fn jacobi_rule(a: f64, b: f64, m: usize) -> Result<Arc<QuadratureRule>> {
    if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Beta weight needs a > 0 and b > 0, got a = {a}, b = {b}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("quadrature order must be >= 1".into()));
    }
    let key = (a.to_bits(), b.to_bits(), m);
    if let Some(rule) = cache().read().expect("rule cache poisoned").get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(golub_welsch(a, b, m)?);
    let mut table = cache().write().expect("rule cache poisoned");
    Ok(table.entry(key).or_insert(rule).clone())
}

fn golub_welsch(a: f64, b: f64, m: usize) -> Result<QuadratureRule> {
    // Jacobi polynomials on [-1, 1] with weight (1-x)^al (1+x)^be, u = (1+x)/2.
    let al = b - 1.0;
    let be = a - 1.0;
    let ab = al + be;
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m];
    for k in 0..m {
        let kf = k as f64;
        let x_diag = if k == 0 {
            (be - al) / (ab + 2.0)
        } else {
            (be * be - al * al) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        diag[k] = 0.5 * (1.0 + x_diag);
        if k + 1 < m {
            let j = kf + 1.0;
            let b2 = if k == 0 {
                4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + al) * (j + be) * (j + ab)
                    / ((2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0))
            };
            off[k] = 0.5 * b2.sqrt();
        }
    }
    let mut first = vec![0.0; m];
    first[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut first)?;
    let mut pairs: Vec<(f64, f64)> = diag.into_iter().zip(first).map(|(u, z)| (u, z * z)).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok(QuadratureRule {
        a,
        b,
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    })
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal and receives the eigenvalues; `e[i]` couples rows
/// `i` and `i + 1`. Only the first row `z` of the eigenvector matrix is
/// tracked, which is all Golub-Welsch needs.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::Domain("tridiagonal QL failed to converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let ex = x.exp();
        ex / (1.0 + ex)
    }
}

const TANH_SINH_TMAX: f64 = 6.0;
const EXP_SINH_TMAX: f64 = 6.5;
const MAX_LEVEL: u32 = 12;

/// Tanh-sinh integral of `f` over `[lo, hi]`.
///
/// `f(x, dl, dr)` receives the node together with its distances to both
/// endpoints, computed without cancellation, so endpoint-singular integrands
/// can be written in terms of `dl` and `dr`.
pub fn tanh_sinh<F>(f: F, lo: f64, hi: f64, rel_tol: f64) -> f64
where
    F: Fn(f64, f64, f64) -> f64,
{
    let len = hi - lo;
    if len == 0.0 {
        return 0.0;
    }
    let term = |t: f64| -> f64 {
        let s = PI * t.sinh();
        let dl = len * logistic(s);
        let dr = len * logistic(-s);
        if dl == 0.0 || dr == 0.0 {
            return 0.0;
        }
        let x = if dl <= dr { lo + dl } else { hi - dr };
        let v = f(x, dl, dr);
        if v == 0.0 {
            return 0.0;
        }
        v * PI * t.cosh() * (dl / len) * dr
    };
    refine(term, TANH_SINH_TMAX, rel_tol)
}

/// Exp-sinh integral of `f` over `(0, ∞)`; `f(x, ln x)`.
pub fn exp_sinh<F>(f: F, rel_tol: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let term = |t: f64| -> f64 {
        let lx = 0.5 * PI * t.sinh();
        let x = lx.exp();
        if x == 0.0 || !x.is_finite() {
            return 0.0;
        }
        let v = f(x, lx);
        if v == 0.0 {
            return 0.0;
        }
        v * x * 0.5 * PI * t.cosh()
    };
    refine(term, EXP_SINH_TMAX, rel_tol)
}

/// Trapezoid sums of `term` on `[-tmax, tmax]` with step halving.
fn refine<T: Fn(f64) -> f64>(term: T, tmax: f64, rel_tol: f64) -> f64 {
    let mut h = 1.0;
    let mut sum = term(0.0);
    let mut k = 1.0;
    while k * h <= tmax {
        sum += term(k * h) + term(-k * h);
        k += 1.0;
    }
    let mut estimate = h * sum;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1.0;
        while k * h <= tmax {
            sum += term(k * h) + term(-k * h);
            k += 2.0;
        }
        let next = h * sum;
        let done = level >= 3 && (next - estimate).abs() <= rel_tol * next.abs().max(1e-300);
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}
