use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measures::base::BaseMeasure;
use crate::measures::parse::{fmt_num, Cursor};

/// One bounded building block of a functional.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    Identity,
    /// Indicator of the closed interval `[lo, hi]`.
    Indicator {
        lo: f64,
        hi: f64,
    },
    /// `slope * y + intercept`.
    Affine {
        slope: f64,
        intercept: f64,
    },
    /// `c0 + c1 y + c2 y^2 + ...`
    Polynomial(Vec<f64>),
    /// Step function: `values[0]` below `breakpoints[0]`, `values[i]` on
    /// `[breakpoints[i-1], breakpoints[i])`, last value above the last break.
    Table {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
}

impl Basis {
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            Basis::Identity => y,
            Basis::Indicator { lo, hi } => {
                if *lo <= y && y <= *hi {
                    1.0
                } else {
                    0.0
                }
            }
            Basis::Affine { slope, intercept } => slope * y + intercept,
            Basis::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * y + ci),
            Basis::Table { breakpoints, values } => values[breakpoints.partition_point(|&b| b <= y)],
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match self {
            Basis::Identity => Ok(()),
            Basis::Indicator { lo, hi } if finite(&[*lo, *hi]) && lo <= hi => Ok(()),
            Basis::Indicator { lo, hi } => Err(Error::InvalidParameter(format!(
                "indicator needs a <= b, got ({lo}, {hi})"
            ))),
            Basis::Affine { slope, intercept } if finite(&[*slope, *intercept]) => Ok(()),
            Basis::Polynomial(c) if !c.is_empty() && finite(c) => Ok(()),
            Basis::Table { breakpoints, values }
                if values.len() == breakpoints.len() + 1
                    && finite(breakpoints)
                    && finite(values)
                    && breakpoints.windows(2).all(|w| w[0] < w[1]) =>
            {
                Ok(())
            }
            other => Err(Error::InvalidParameter(format!("malformed functional {other:?}"))),
        }
    }

    fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Basis::Indicator { lo, hi } => out.extend([*lo, *hi]),
            Basis::Table { breakpoints, .. } => out.extend(breakpoints),
            _ => {}
        }
    }

    /// Exact range of the block on `[lo, hi]`.
    fn range_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let minmax = |xs: &[f64]| {
            xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            })
        };
        match self {
            Basis::Identity => (lo, hi),
            Basis::Indicator { lo: a, hi: b } => {
                let overlaps = *a <= hi && lo <= *b;
                let inside = *a <= lo && hi <= *b;
                (if inside { 1.0 } else { 0.0 }, if overlaps { 1.0 } else { 0.0 })
            }
            Basis::Affine { .. } => minmax(&[self.eval(lo), self.eval(hi)]),
            Basis::Polynomial(c) => {
                let mut pts = vec![self.eval(lo), self.eval(hi)];
                pts.extend(poly_critical_points(c, lo, hi).into_iter().map(|x| self.eval(x)));
                minmax(&pts)
            }
            Basis::Table { breakpoints, values } => {
                let first = breakpoints.partition_point(|&b| b <= lo);
                let last = breakpoints.partition_point(|&b| b <= hi);
                minmax(&values[first..=last])
            }
        }
    }
}

/// Real roots of `p'` inside `(lo, hi)`, located by sign changes on a grid
/// and refined by bisection.
fn poly_critical_points(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    if c.len() < 3 || lo >= hi {
        return vec![];
    }
    let deriv: Vec<f64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| k as f64 * ck)
        .collect();
    let dp = |y: f64| deriv.iter().rev().fold(0.0, |acc, &ci| acc * y + ci);
    const GRID: usize = 4096;
    let step = (hi - lo) / GRID as f64;
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = dp(x0);
    for i in 1..=GRID {
        let x1 = if i == GRID { hi } else { lo + step * i as f64 };
        let f1 = dp(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                let fm = dp(m);
                if fa * fm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// A bounded real map `g`, written as a linear combination `Σ c_i b_i` of
/// basis blocks. A single block with coefficient one is the common case;
/// longer combinations represent joint functionals `Σ z_i g_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    terms: Vec<(f64, Basis)>,
}

impl Functional {
    pub fn new(terms: Vec<(f64, Basis)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("functional has no terms".into()));
        }
        for (c, b) in &terms {
            if !c.is_finite() {
                return Err(Error::InvalidParameter("coefficient must be finite".into()));
            }
            b.validate()?;
        }
        Ok(Self { terms })
    }

    pub fn from_basis(b: Basis) -> Result<Self> {
        Self::new(vec![(1.0, b)])
    }

    pub fn identity() -> Self {
        Self::from_basis(Basis::Identity).expect("identity is valid")
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::from_basis(Basis::Polynomial(vec![c]))
    }

    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Self::from_basis(Basis::Indicator { lo, hi })
    }

    /// `Σ z_i g_i`.
    pub fn linear_combination(parts: &[(f64, &Functional)]) -> Result<Self> {
        let terms = parts
            .iter()
            .flat_map(|(z, g)| g.terms.iter().map(move |(c, b)| (z * c, b.clone())))
            .collect();
        Self::new(terms)
    }

    pub fn terms(&self) -> &[(f64, Basis)] {
        &self.terms
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.terms.iter().map(|(c, b)| c * b.eval(y)).sum()
    }

    /// Points where `g` may jump; diffuse integrals are split there.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (_, b) in &self.terms {
            b.breakpoints(&mut out);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Declared range `[g_lo, g_hi]` of `g` on the support of `h`.
    ///
    /// Exact on atoms and for single-block functionals; for combinations the
    /// diffuse part uses the sum of the per-block ranges, which still bounds `g`.
    pub fn range_on(&self, h: &BaseMeasure) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for atom in h.atoms() {
            let v = self.eval(atom.location);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if let Some((d, _)) = h.diffuse() {
            let (a, b) = d.support();
            let (mut dlo, mut dhi) = (0.0, 0.0);
            for (c, basis) in &self.terms {
                let (r0, r1) = basis.range_on(a, b);
                let (s0, s1) = if *c >= 0.0 {
                    (c * r0, c * r1)
                } else {
                    (c * r1, c * r0)
                };
                dlo += s0;
                dhi += s1;
            }
            lo = lo.min(dlo);
            hi = hi.max(dhi);
        }
        (lo, hi)
    }

    /// `max |g|` over the support of `h`.
    pub fn sup_norm_on(&self, h: &BaseMeasure) -> f64 {
        let (lo, hi) = self.range_on(h);
        lo.abs().max(hi.abs())
    }

    pub fn is_nonnegative_on(&self, h: &BaseMeasure) -> bool {
        self.range_on(h).0 >= 0.0
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &[f64]| xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(",");
        match self {
            Basis::Identity => f.write_str("id"),
            Basis::Indicator { lo, hi } => {
                write!(f, "indicator({},{})", fmt_num(*lo), fmt_num(*hi))
            }
            Basis::Affine { slope, intercept } => {
                write!(f, "affine({},{})", fmt_num(*slope), fmt_num(*intercept))
            }
            Basis::Polynomial(c) if c.len() == 1 => write!(f, "const({})", fmt_num(c[0])),
            Basis::Polynomial(c) => write!(f, "poly({})", list(c)),
            Basis::Table { breakpoints, values } => {
                write!(f, "table({};{})", list(breakpoints), list(values))
            }
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, b)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if *c != 1.0 {
                write!(f, "{}*", fmt_num(*c))?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Functional {
    type Err = Error;

    /// Parses `[c*]block (+ [c*]block)*` with blocks `id`, `const(c)`,
    /// `indicator(a,b)`, `affine(slope,intercept)`, `poly(c0,c1,...)` and
    /// `table(b1,...;v0,...)`. A bare number is a constant.
    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new("functional", s);
        let mut terms = Vec::new();
        loop {
            let mut coef = 1.0;
            let mut bare_constant = None;
            if cur.starts_number() {
                let c = cur.number()?;
                if cur.eat('*') {
                    coef = c;
                } else {
                    bare_constant = Some(c);
                }
            }
            let basis = match bare_constant {
                Some(c) => Basis::Polynomial(vec![c]),
                None => {
                    let name = cur.ident()?;
                    match name {
                        "id" | "identity" => Basis::Identity,
                        "const" => match cur.args()?[..] {
                            [c] => Basis::Polynomial(vec![c]),
                            _ => return Err(cur.error("const takes one value")),
                        },
                        "indicator" => match cur.args()?[..] {
                            [lo, hi] => Basis::Indicator { lo, hi },
                            _ => return Err(cur.error("indicator takes (a, b)")),
                        },
                        "affine" => match cur.args()?[..] {
                            [slope, intercept] => Basis::Affine { slope, intercept },
                            _ => return Err(cur.error("affine takes (slope, intercept)")),
                        },
                        "poly" => Basis::Polynomial(cur.args()?),
                        "table" => {
                            let mut groups = cur.arg_groups()?;
                            if groups.len() != 2 {
                                return Err(cur.error("table takes (breakpoints; values)"));
                            }
                            let values = groups.pop().unwrap();
                            let breakpoints = groups.pop().unwrap();
                            Basis::Table {
                                breakpoints,
                                values,
                            }
                        }
                        other => {
                            return Err(cur.error(format!(
                                "unknown functional `{other}` (expected id, const, indicator, affine, poly, table)"
                            )))
                        }
                    }
                }
            };
            terms.push((coef, basis));
            if cur.at_end() {
                break;
            }
            if cur.peek() == Some('-') {
                continue;
            }
            cur.expect('+')?;
        }
        Functional::new(terms).map_err(|e| Error::parse("functional", e.to_string()))
    }
}
