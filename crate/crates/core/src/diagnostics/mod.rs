//! Measurable functionals of lattice runs and continuum states.

pub mod acl;
pub mod bilinear;
pub mod nonres;
pub mod norms;
pub mod tails;

pub use acl::{acl_drift_curve, AclAccumulator, AclOptions, DriftCurve};
pub use bilinear::{
    bilinear_ratio_experiment, bilinear_sweep, BilinearOptions, BilinearRecord, BilinearSweep,
};
pub use nonres::{
    nonresonance_integral, nonresonance_values, MixedTerm, NonresonanceAccumulator,
    NonresonanceValues,
};
pub use norms::{
    spacetime_norm, strichartz_report, NormSpec, SpacetimeAccumulator, StrichartzAccumulator,
    StrichartzReport,
};
pub use tails::{frequency_tail, lattice_frequency_tail, spatial_tail};

use crate::scalar::Real;

/// Least-squares slope of `ys` against `xs`; `None` for fewer than two
/// points or a degenerate abscissa.
pub fn fit_slope<T: Real>(xs: &[T], ys: &[T]) -> Option<T> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let n = T::from_count(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (sxy, sxx) = xs
        .iter()
        .zip(ys)
        .fold((T::zero(), T::zero()), |(sxy, sxx), (&x, &y)| {
            (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
        });
    (sxx > T::zero()).then(|| sxy / sxx)
}

/// Median of a non-empty slice (mean of the middle pair for even length).
pub fn median<T: Real>(values: &[T]) -> T {
    if values.is_empty() {
        return T::nan();
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0].iter().map(|x| x.ln()).collect();
        let ys: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0]
            .iter()
            .map(|x| (3.0 * x.powf(-0.5)).ln())
            .collect();
        assert!((fit_slope(&xs, &ys).unwrap() + 0.5).abs() < 1e-14);
        assert_eq!(fit_slope(&xs[..1], &ys[..1]), None);
        assert_eq!(fit_slope(&[1.0, 1.0], &[0.0, 2.0]), None);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median::<f64>(&[]).is_nan());
    }
}
