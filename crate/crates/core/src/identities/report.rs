//! Parameter records and check reports.

use serde::{Deserialize, Serialize};

/// Parameters of one check. Unset fields take the check's defaults; a
/// report carries the fully resolved record so it can be re-run as is.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    /// Base measure, e.g. `0.5*delta(0)+0.5*delta(1)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    /// Functional, e.g. `id` or `indicator(0.5,1.5)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_grid: Option<Vec<f64>>,
    /// `(v, w)` pairs for the joint Laplace transform of `(T, μ(g))`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vw_grid: Option<Vec<[f64; 2]>>,
    /// Distinct observed values `Y*_j`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<f64>>,
    /// Multiplicities `e_j` of `atoms`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<Vec<f64>>,
    /// `(T, q)` pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_grid: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Multiplies every right-hand side; anything but 1 corrupts the check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs_scale: Option<f64>,
}

impl CheckParams {
    /// Fills every unset field of `self` from `other`.
    pub fn or(mut self, other: &CheckParams) -> CheckParams {
        macro_rules! fill {
            ($($f:ident),*) => { $( if self.$f.is_none() { self.$f = other.$f.clone(); } )* };
        }
        fill!(
            theta, q, d, n, n_list, base, functional, z_grid, vw_grid, atoms, sizes, alpha, p_grid,
            theta_grid, gamma_grid, n_samples, eps, quad_order, seed, rhs_scale
        );
        self
    }
}

/// How a grid point is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Rule {
    /// `|lhs - rhs| ≤ k·√(se_lhs² + se_rhs²) + 10·eps`.
    StdErr { k: f64, eps: f64 },
    /// `|lhs - rhs| ≤ tol`.
    Absolute { tol: f64 },
    /// `|lhs - rhs| ≤ tol·|rhs|`.
    Relative { tol: f64 },
    /// KS statistic (stored in `lhs`) below `threshold`.
    Ks { threshold: f64 },
}

/// One compared quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_se: f64,
    pub rhs_se: f64,
    pub rule: Rule,
    /// The quantity compared against the tolerance.
    pub statistic: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl GridPoint {
    pub fn new(label: impl Into<String>, lhs: (f64, f64), rhs: (f64, f64), rule: Rule) -> Self {
        let diff = (lhs.0 - rhs.0).abs();
        let (statistic, tolerance) = match rule {
            Rule::StdErr { k, eps } => (diff, k * lhs.1.hypot(rhs.1) + 10.0 * eps),
            Rule::Absolute { tol } => (diff, tol),
            Rule::Relative { tol } => (diff, tol * rhs.0.abs()),
            Rule::Ks { threshold } => (lhs.0, threshold),
        };
        let pass = match rule {
            Rule::Ks { .. } => statistic < tolerance,
            _ => statistic <= tolerance,
        };
        Self {
            label: label.into(),
            lhs: lhs.0,
            rhs: rhs.0,
            lhs_se: lhs.1,
            rhs_se: rhs.1,
            rule,
            statistic,
            tolerance,
            pass,
        }
    }

    /// A KS comparison; `rhs` holds the threshold for readability.
    pub fn ks(label: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self::new(label, (statistic, 0.0), (threshold, 0.0), Rule::Ks { threshold })
    }
}

/// Result of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub params: CheckParams,
    pub points: Vec<GridPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl CheckReport {
    pub fn new(check: &str, params: CheckParams, points: Vec<GridPoint>) -> Self {
        let pass = points.iter().all(|p| p.pass);
        Self {
            check: check.to_string(),
            params,
            points,
            notes: Vec::new(),
            pass,
            duration_ms: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}
