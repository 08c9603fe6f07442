//! Kolmogorov-Smirnov statistics and their asymptotic null thresholds.

use crate::error::{Error, Result};

/// Asymptotic 99% quantile coefficient of `√N · D`.
pub const KS_C99: f64 = 1.63;
/// Asymptotic 99.9% quantile coefficient of `√N · D`.
pub const KS_C999: f64 = 1.95;

fn sorted(xs: &[f64], what: &str) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter(format!("{what} sample is empty")));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::Domain(format!("{what} sample contains NaN")));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `sup_x |F_N(x) - F(x)|` for the empirical distribution of `xs`.
pub fn ks_vs_cdf<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> Result<f64> {
    let v = sorted(xs, "one-sample")?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        // Jump of the empirical CDF across a run of ties.
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        let f = cdf(v[i]);
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    Ok(d)
}

/// `sup_x |F_N(x) - G_M(x)|` for two empirical distributions.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let a = sorted(xs, "first")?;
    let b = sorted(ys, "second")?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// 99.9% null threshold for the one-sample statistic.
pub fn ks_threshold_one_sample(n: usize) -> f64 {
    KS_C999 / (n as f64).sqrt()
}

/// 99.9% null threshold for the two-sample statistic.
pub fn ks_threshold_two_sample(n1: usize, n2: usize) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    KS_C999 * ((a + b) / (a * b)).sqrt()
}
