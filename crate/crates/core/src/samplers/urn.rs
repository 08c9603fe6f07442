//! Urn schemes and the Ewens partition law.

use rand::Rng;

use crate::error::{Error, Result};
use crate::measures::{ObservationSet, Partition, ShapeMeasure};
use crate::samplers::process::sample_base;
use crate::transforms::special::log_gamma;

/// Largest `n` accepted by [`enumerate_partitions`].
pub const MAX_ENUMERATION: usize = 12;

/// Chinese-restaurant seating: item `i` (zero-based) joins cell `j` with
/// probability `e_j/(θ+i)` and opens a new cell with probability `θ/(θ+i)`.
pub fn sample_crp<R: Rng + ?Sized>(theta: f64, n: usize, rng: &mut R) -> Result<Partition> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "theta must be positive, got {theta}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(Partition::from_labels(&crp_labels(theta, n, rng)))
}

/// Cell labels of a CRP draw; a new cell gets the next unused label.
fn crp_labels<R: Rng + ?Sized>(theta: f64, n: usize, rng: &mut R) -> Vec<usize> {
    let mut labels = Vec::with_capacity(n);
    let mut sizes: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = rng.random::<f64>() * (theta + i as f64);
        let mut acc = theta;
        let mut choice = sizes.len();
        if r >= acc {
            for (j, &e) in sizes.iter().enumerate() {
                acc += e as f64;
                if r < acc {
                    choice = j;
                    break;
                }
            }
            // Rounding past the last cell joins the last cell.
            if choice == sizes.len() {
                choice = sizes.len() - 1;
            }
        }
        if choice == sizes.len() {
            sizes.push(1);
        } else {
            sizes[choice] += 1;
        }
        labels.push(choice);
    }
    labels
}

/// Blackwell-MacQueen urn: `Y_i ~ (θH + Σ_{j<i} δ_{Y_j}) / (θ + i - 1)`.
pub fn sample_blackwell_macqueen<R: Rng + ?Sized>(
    shape: &ShapeMeasure,
    n: usize,
    rng: &mut R,
) -> Result<ObservationSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(ObservationSet::new(urn_values(shape, n, rng)))
}

pub(crate) fn urn_values<R: Rng + ?Sized>(shape: &ShapeMeasure, n: usize, rng: &mut R) -> Vec<f64> {
    let theta = shape.theta();
    let mut values: Vec<f64> = Vec::with_capacity(n);
    for i in 0..n {
        let r = rng.random::<f64>() * (theta + i as f64);
        if r < theta {
            values.push(sample_base(shape.base(), rng));
        } else {
            let k = ((r - theta) as usize).min(i - 1);
            values.push(values[k]);
        }
    }
    values
}

/// `log π(p|θ) = n(p) log θ + log Γ(θ) - log Γ(θ+n) + Σ_j log (e_j - 1)!`.
pub fn ewens_log_prob(p: &Partition, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "theta must be positive, got {theta}"
        )));
    }
    ewens_log_prob_sizes(&p.sizes(), theta)
}

pub(crate) fn ewens_log_prob_sizes(sizes: &[usize], theta: f64) -> Result<f64> {
    let n: usize = sizes.iter().sum();
    let mut lp = sizes.len() as f64 * theta.ln() + log_gamma(theta)? - log_gamma(theta + n as f64)?;
    for &e in sizes {
        lp += log_gamma(e as f64)?;
    }
    Ok(lp)
}

/// All set partitions of `{0, .., n-1}`, each exactly once, generated lazily
/// from restricted growth strings.
pub fn enumerate_partitions(n: usize) -> Result<Partitions> {
    if !(1..=MAX_ENUMERATION).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "partition enumeration needs 1 <= n <= {MAX_ENUMERATION}, got {n}"
        )));
    }
    Ok(Partitions {
        labels: vec![0; n],
        maxes: vec![0; n],
        done: false,
    })
}

/// Iterator returned by [`enumerate_partitions`].
#[derive(Debug, Clone)]
pub struct Partitions {
    labels: Vec<usize>,
    /// `maxes[i]` is the largest label among `labels[..=i]`.
    maxes: Vec<usize>,
    done: bool,
}

impl Partitions {
    /// Current restricted growth string.
    fn advance(&mut self) {
        let n = self.labels.len();
        for i in (1..n).rev() {
            if self.labels[i] <= self.maxes[i - 1] {
                self.labels[i] += 1;
                self.maxes[i] = self.maxes[i - 1].max(self.labels[i]);
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.maxes[j] = self.maxes[i];
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let p = Partition::from_labels(&self.labels);
        self.advance();
        Some(p)
    }
}
