use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measures::parse::{fmt_num, Cursor};
use crate::transforms::quadrature::{jacobi_rule, tanh_sinh};
use crate::transforms::special::{log_beta, reg_inc_beta};

/// Order of the fixed Gauss rule used for expectations under a diffuse family.
pub const DIFFUSE_ORDER: usize = 256;

const MASS_TOL: f64 = 1e-12;

/// A diffuse (non-atomic) family on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diffuse {
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Beta(a, b) on [0, 1]; Beta(1/2, 1/2) is the arcsine law.
    Beta {
        a: f64,
        b: f64,
    },
}

impl Diffuse {
    pub fn arcsine() -> Self {
        Diffuse::Beta { a: 0.5, b: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Diffuse::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidParameter(format!(
                        "uniform needs finite a < b, got ({lo}, {hi})"
                    )));
                }
            }
            Diffuse::Beta { a, b } => {
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "beta needs a > 0 and b > 0, got ({a}, {b})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Closed support interval.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Diffuse::Uniform { lo, hi } => (lo, hi),
            Diffuse::Beta { .. } => (0.0, 1.0),
        }
    }

    pub fn cdf(&self, y: f64) -> f64 {
        match *self {
            Diffuse::Uniform { lo, hi } => ((y - lo) / (hi - lo)).clamp(0.0, 1.0),
            Diffuse::Beta { a, b } => reg_inc_beta(a, b, y.clamp(0.0, 1.0)).unwrap_or(f64::NAN),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Diffuse::Uniform { lo, hi } => 0.5 * (lo + hi),
            Diffuse::Beta { a, b } => a / (a + b),
        }
    }

    /// Splits the support at the interior points of `breaks`.
    fn pieces(&self, breaks: &[f64]) -> Vec<(f64, f64)> {
        let (lo, hi) = self.support();
        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut edges = Vec::with_capacity(cuts.len() + 2);
        edges.push(lo);
        edges.extend(cuts);
        edges.push(hi);
        edges.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// `E[f(Y)]` for `Y` from this family, by a fixed 256-node Gauss rule on
    /// each piece between `breaks`. Endpoint singularities of the Beta
    /// density are absorbed into the Gauss-Jacobi weight.
    pub fn expect<F: Fn(f64) -> f64>(&self, breaks: &[f64], f: F) -> f64 {
        match *self {
            Diffuse::Uniform { lo, hi } => {
                let rule = jacobi_rule(1.0, 1.0, DIFFUSE_ORDER).expect("valid rule");
                self.pieces(breaks)
                    .into_iter()
                    .map(|(c, d)| {
                        let len = d - c;
                        len / (hi - lo) * rule.integrate(|t| f(c + len * t))
                    })
                    .sum()
            }
            Diffuse::Beta { a, b } => {
                let lb = log_beta(a, b).expect("validated beta");
                self.pieces(breaks)
                    .into_iter()
                    .map(|(c, d)| {
                        let len = d - c;
                        let left = if c == 0.0 { a - 1.0 } else { 0.0 };
                        let right = if d == 1.0 { b - 1.0 } else { 0.0 };
                        let rule = jacobi_rule(left + 1.0, right + 1.0, DIFFUSE_ORDER).expect("valid rule");
                        let scale = (log_beta(left + 1.0, right + 1.0).expect("positive") - lb).exp() * len;
                        // Density factors not carried by the Gauss weight.
                        let left_factor = |y: f64| {
                            if c == 0.0 {
                                len.powf(a - 1.0)
                            } else {
                                y.powf(a - 1.0)
                            }
                        };
                        let right_factor = |y: f64| {
                            if d == 1.0 {
                                len.powf(b - 1.0)
                            } else {
                                (1.0 - y).powf(b - 1.0)
                            }
                        };
                        scale
                            * rule.integrate(|t| {
                                let y = c + len * t;
                                f(y) * left_factor(y) * right_factor(y)
                            })
                    })
                    .sum()
            }
        }
    }

    /// Same expectation by tanh-sinh on each piece. Slower, but independent
    /// of the Gauss rules; used to validate [`Diffuse::expect`].
    pub fn expect_adaptive<F: Fn(f64) -> f64>(&self, breaks: &[f64], f: F, rel_tol: f64) -> f64 {
        match *self {
            Diffuse::Uniform { lo, hi } => self
                .pieces(breaks)
                .into_iter()
                .map(|(c, d)| tanh_sinh(|y, _, _| f(y), c, d, rel_tol) / (hi - lo))
                .sum(),
            Diffuse::Beta { a, b } => {
                let lb = log_beta(a, b).expect("validated beta");
                self.pieces(breaks)
                    .into_iter()
                    .map(|(c, d)| {
                        tanh_sinh(
                            |y, dl, dr| {
                                let y0 = c + dl;
                                let y1 = (1.0 - d) + dr;
                                f(y) * ((a - 1.0) * y0.ln() + (b - 1.0) * y1.ln() - lb).exp()
                            },
                            c,
                            d,
                            rel_tol,
                        )
                    })
                    .sum()
            }
        }
    }
}

impl fmt::Display for Diffuse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Diffuse::Uniform { lo, hi } => write!(f, "uniform({},{})", fmt_num(lo), fmt_num(hi)),
            Diffuse::Beta { a, b } => write!(f, "beta({},{})", fmt_num(a), fmt_num(b)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub prob: f64,
}

/// A probability measure on the real line: an optional diffuse component
/// with weight `w_c` plus finitely many atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMeasure {
    diffuse: Option<(Diffuse, f64)>,
    atoms: Vec<Atom>,
}

impl BaseMeasure {
    /// Builds and validates a mixture. Atom locations must be distinct
    /// (compared bitwise) and the total mass must be one.
    pub fn new(diffuse: Option<(Diffuse, f64)>, atoms: Vec<Atom>) -> Result<Self> {
        let diffuse = diffuse.filter(|&(_, w)| w != 0.0);
        if let Some((d, w)) = &diffuse {
            d.validate()?;
            if !(*w > 0.0 && *w <= 1.0 + MASS_TOL) {
                return Err(Error::InvalidParameter(format!(
                    "diffuse weight must lie in (0, 1], got {w}"
                )));
            }
        }
        for (i, atom) in atoms.iter().enumerate() {
            if !atom.location.is_finite() {
                return Err(Error::InvalidParameter("atom location must be finite".into()));
            }
            if !(atom.prob > 0.0 && atom.prob.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "atom probabilities must be positive, got {} at {}",
                    atom.prob, atom.location
                )));
            }
            if atoms[..i]
                .iter()
                .any(|a| a.location.to_bits() == atom.location.to_bits())
            {
                return Err(Error::InvalidParameter(format!(
                    "duplicate atom location {}",
                    atom.location
                )));
            }
        }
        let total = diffuse.map_or(0.0, |(_, w)| w) + atoms.iter().map(|a| a.prob).sum::<f64>();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidParameter(format!(
                "base measure mass must be 1, got {total}"
            )));
        }
        Ok(Self { diffuse, atoms })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Some((Diffuse::Uniform { lo, hi }, 1.0)), vec![])
    }

    pub fn beta(a: f64, b: f64) -> Result<Self> {
        Self::new(Some((Diffuse::Beta { a, b }, 1.0)), vec![])
    }

    pub fn arcsine() -> Self {
        Self::beta(0.5, 0.5).expect("arcsine is valid")
    }

    pub fn delta(location: f64) -> Result<Self> {
        Self::atomic(&[(location, 1.0)])
    }

    pub fn atomic(atoms: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            None,
            atoms
                .iter()
                .map(|&(location, prob)| Atom { location, prob })
                .collect(),
        )
    }

    pub fn diffuse(&self) -> Option<(Diffuse, f64)> {
        self.diffuse
    }

    pub fn diffuse_weight(&self) -> f64 {
        self.diffuse.map_or(0.0, |(_, w)| w)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_diffuse(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_atomic(&self) -> bool {
        self.diffuse.is_none()
    }

    /// Probability of the single point `y`.
    pub fn atom_prob(&self, y: f64) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.location.to_bits() == y.to_bits())
            .map_or(0.0, |a| a.prob)
    }

    /// Smallest interval containing the support.
    pub fn hull(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        if let Some((d, _)) = self.diffuse {
            let (a, b) = d.support();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        for atom in &self.atoms {
            lo = lo.min(atom.location);
            hi = hi.max(atom.location);
        }
        (lo, hi)
    }

    /// `∫ f dH`: exact over atoms, Gauss quadrature over the diffuse part
    /// split at `breaks`.
    pub fn expect<F: Fn(f64) -> f64>(&self, breaks: &[f64], f: F) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.prob * f(a.location)).sum();
        match self.diffuse {
            Some((d, w)) => atoms + w * d.expect(breaks, &f),
            None => atoms,
        }
    }

    /// As [`BaseMeasure::expect`] with the adaptive route for the diffuse part.
    pub fn expect_adaptive<F: Fn(f64) -> f64>(&self, breaks: &[f64], f: F, rel_tol: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.prob * f(a.location)).sum();
        match self.diffuse {
            Some((d, w)) => atoms + w * d.expect_adaptive(breaks, &f, rel_tol),
            None => atoms,
        }
    }

    /// `H((-∞, y])`.
    pub fn cdf(&self, y: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.location <= y)
            .map(|a| a.prob)
            .sum();
        atoms + self.diffuse.map_or(0.0, |(d, w)| w * d.cdf(y))
    }
}

impl fmt::Display for BaseMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            if first {
                first = false;
                Ok(())
            } else {
                f.write_str("+")
            }
        };
        if let Some((d, w)) = self.diffuse {
            sep(f)?;
            if w != 1.0 {
                write!(f, "{}*", fmt_num(w))?;
            }
            write!(f, "{d}")?;
        }
        for atom in &self.atoms {
            sep(f)?;
            if atom.prob != 1.0 {
                write!(f, "{}*", fmt_num(atom.prob))?;
            }
            write!(f, "delta({})", fmt_num(atom.location))?;
        }
        Ok(())
    }
}

impl FromStr for BaseMeasure {
    type Err = Error;

    /// Parses `[w*]component (+ [w*]component)*` where a component is
    /// `delta(x)`, `uniform(a,b)`, `beta(a,b)` or `arcsine`.
    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new("base", s);
        let mut diffuse: Option<(Diffuse, f64)> = None;
        let mut atoms: Vec<Atom> = Vec::new();
        loop {
            let weight = if cur.starts_number() {
                let w = cur.number()?;
                cur.expect('*')?;
                w
            } else {
                1.0
            };
            let name = cur.ident()?;
            let component = match name {
                "delta" | "atom" => {
                    let args = cur.args()?;
                    if args.len() != 1 {
                        return Err(cur.error("delta takes one location"));
                    }
                    atoms.push(Atom {
                        location: args[0],
                        prob: weight,
                    });
                    None
                }
                "uniform" => match cur.args()?[..] {
                    [lo, hi] => Some(Diffuse::Uniform { lo, hi }),
                    _ => return Err(cur.error("uniform takes (a, b)")),
                },
                "beta" => match cur.args()?[..] {
                    [a, b] => Some(Diffuse::Beta { a, b }),
                    _ => return Err(cur.error("beta takes (a, b)")),
                },
                "arcsine" => Some(Diffuse::arcsine()),
                other => {
                    return Err(cur.error(format!(
                        "unknown component `{other}` (expected delta, uniform, beta, arcsine)"
                    )))
                }
            };
            if let Some(d) = component {
                if diffuse.is_some() {
                    return Err(cur.error("at most one diffuse component is supported"));
                }
                diffuse = Some((d, weight));
            }
            if cur.at_end() {
                break;
            }
            cur.expect('+')?;
        }
        BaseMeasure::new(diffuse, atoms).map_err(|e| Error::parse("base", e.to_string()))
    }
}
