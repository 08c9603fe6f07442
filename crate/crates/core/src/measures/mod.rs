//! Base measures, shapes, functionals, realized random measures and
//! partitions.

mod base;
mod functional;
pub(crate) mod parse;
mod partition;
mod realization;
mod shape;

pub use base::{Atom, BaseMeasure, Diffuse, DIFFUSE_ORDER};
pub use functional::{Basis, Functional};
pub use partition::{ObservationSet, Partition};
pub use realization::{functional_eval, RandomMeasureRealization};
pub use shape::{posterior_shape, ShapeMeasure};

/// `∫ log(1 + |g(y)|) θH(dy)`, the integrability quantity for `P(g)`.
///
/// Always finite for bounded `g`, and at most `θ log(1 + sup|g|)`.
pub fn integrability_value(shape: &ShapeMeasure, g: &Functional) -> f64 {
    shape.theta() * shape.base().expect(&g.breakpoints(), |y| g.eval(y).abs().ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrability_examples() {
        let id = Functional::identity();
        let s = ShapeMeasure::new(1.0, BaseMeasure::delta(0.0).unwrap()).unwrap();
        assert_eq!(integrability_value(&s, &id), 0.0);
        let s = ShapeMeasure::new(2.0, BaseMeasure::delta(1.0).unwrap()).unwrap();
        assert!((integrability_value(&s, &id) - 2.0 * 2f64.ln()).abs() < 1e-15);
        let s = ShapeMeasure::new(1.0, BaseMeasure::uniform(0.0, 1.0).unwrap()).unwrap();
        assert!((integrability_value(&s, &id) - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn integrability_bounded_by_sup_norm() {
        let s = ShapeMeasure::new(3.0, "0.4*uniform(-2,1)+0.6*delta(0.5)".parse().unwrap()).unwrap();
        for g in ["id", "poly(1,-3,2)", "5*indicator(0,0.3)"] {
            let g: Functional = g.parse().unwrap();
            let bound = s.theta() * g.sup_norm_on(s.base()).ln_1p();
            assert!(integrability_value(&s, &g) <= bound + 1e-12);
        }
    }
}
