use crate::error::{Error, Result};
use crate::measures::functional::Functional;

/// A finite atomic draw of a random measure: `P`, `μ` or a Beta-Gamma `μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomMeasureRealization {
    atoms: Vec<(f64, f64)>,
    total_mass: f64,
    normalized: bool,
    truncation_bound: f64,
}

impl RandomMeasureRealization {
    /// A random probability measure; weights must sum to one up to the
    /// truncation bound.
    pub fn normalized(atoms: Vec<(f64, f64)>, truncation_bound: f64) -> Result<Self> {
        check_weights(&atoms)?;
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > truncation_bound + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "normalized weights sum to {total}"
            )));
        }
        Ok(Self {
            atoms,
            total_mass: 1.0,
            normalized: true,
            truncation_bound,
        })
    }

    /// An unnormalized measure; the total mass is the weight sum.
    pub fn unnormalized(atoms: Vec<(f64, f64)>, truncation_bound: f64) -> Result<Self> {
        check_weights(&atoms)?;
        let total_mass = atoms.iter().map(|a| a.1).sum();
        Ok(Self {
            atoms,
            total_mass,
            normalized: false,
            truncation_bound,
        })
    }

    /// `t · self` as an unnormalized measure.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {t}"
            )));
        }
        Self::unnormalized(
            self.atoms.iter().map(|&(y, w)| (y, t * w)).collect(),
            self.truncation_bound,
        )
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn truncation_bound(&self) -> f64 {
        self.truncation_bound
    }

    /// Mass of the set `{y : pred(y)}`.
    pub fn mass_where<P: Fn(f64) -> bool>(&self, pred: P) -> f64 {
        self.atoms.iter().filter(|a| pred(a.0)).map(|a| a.1).sum()
    }
}

fn check_weights(atoms: &[(f64, f64)]) -> Result<()> {
    if atoms
        .iter()
        .any(|&(y, w)| !(w > 0.0 && w.is_finite()) || !y.is_finite())
    {
        return Err(Error::InvalidParameter(
            "realization weights must be positive and finite".into(),
        ));
    }
    Ok(())
}

/// `P(g) = Σ w_i g(y_i)`.
pub fn functional_eval(m: &RandomMeasureRealization, g: &Functional) -> f64 {
    m.atoms.iter().map(|&(y, w)| w * g.eval(y)).sum()
}
