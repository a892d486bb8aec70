//! Tightness diagnostics: mass outside a frequency ball and outside a
//! spatial window.

use crate::continuum::CoupledState;
use crate::error::{Error, Result};
use crate::field::{ContinuumField, LatticeField};
use crate::lattice::split_mass;
use crate::scalar::Real;
use crate::spectral::{continuum_spectrum, CutoffSpec};

fn high_frequency_mass<T: Real>(f: &ContinuumField<T>, kappa: T) -> T {
    let grid = *f.grid();
    let coeffs = continuum_spectrum(f);
    let s = coeffs
        .iter()
        .enumerate()
        .filter(|(j, _)| grid.wavenumber(*j).abs() >= kappa)
        .fold(T::zero(), |acc, (_, c)| acc + c.norm_sqr());
    s / grid.length()
}

/// `||P_{|xi| >= kappa} psi||^2 + ||P_{|xi| >= kappa} phi||^2`.
pub fn frequency_tail<T: Real>(state: &CoupledState<T>, kappa: T) -> T {
    high_frequency_mass(state.psi(), kappa) + high_frequency_mass(state.phi(), kappa)
}

/// `h^{-1} M[P_{>= sin(kappa h)} u]`, the lattice side of the frequency tail.
/// Zero once `kappa h >= pi/2`.
pub fn lattice_frequency_tail<T: Real>(u: &LatticeField<T>, kappa: T) -> Result<T> {
    let h = u.h();
    let angle = kappa * h;
    if !(kappa > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    if angle >= T::FRAC_PI_2() {
        return Ok(T::zero());
    }
    let (_, outside) = split_mass(u, CutoffSpec::new(angle.sin())?);
    Ok(outside / h)
}

/// `int_{|x| >= R} |psi|^2 + |phi|^2 dx` on centred torus coordinates.
pub fn spatial_tail<T: Real>(state: &CoupledState<T>, radius: T) -> Result<T> {
    let grid = *state.grid();
    let half = grid.length() / T::lit(2.0);
    if !(radius >= T::zero() && radius <= half) {
        return Err(Error::InvalidParameter(format!(
            "radius {radius} must lie in [0, {half}]"
        )));
    }
    let s = state
        .psi()
        .values()
        .iter()
        .zip(state.phi().values())
        .enumerate()
        .filter(|(j, _)| grid.position(*j).abs() >= radius)
        .fold(T::zero(), |acc, (_, (a, b))| {
            acc + a.norm_sqr() + b.norm_sqr()
        });
    Ok(s * grid.spacing())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::scalar::{cis, Cx};
    use crate::spectral::Reconstructor;
    use std::f64::consts::TAU;

    fn gaussian_state(width: f64) -> CoupledState<f64> {
        let g = TorusGrid::from_length(64.0, 512).unwrap();
        let psi =
            ContinuumField::from_fn(g, |x| Cx::new((-x * x / (2.0 * width * width)).exp(), 0.0))
                .unwrap();
        CoupledState::new(psi, ContinuumField::zeros(g)).unwrap()
    }

    #[test]
    fn band_limited_state_has_no_tail_above_band() {
        let g = TorusGrid::from_length(64.0, 256).unwrap();
        let xi = TAU * 5.0 / 64.0;
        let psi = ContinuumField::from_fn(g, |x| cis(xi * x)).unwrap();
        let phi = ContinuumField::from_fn(g, |x| cis(-2.0 * xi * x) * 0.5).unwrap();
        let s = CoupledState::new(psi, phi).unwrap();
        assert!(frequency_tail(&s, 2.0 * xi + 0.01) < 1e-24);
        let t = frequency_tail(&s, xi);
        assert!((t - (64.0 + 0.25 * 64.0)).abs() < 1e-10);
    }

    #[test]
    fn frequency_tail_non_increasing() {
        let s = gaussian_state(0.5);
        let tails: Vec<f64> = [0.5, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&k| frequency_tail(&s, k))
            .collect();
        assert!(tails.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn lattice_and_continuum_tails_agree() {
        let h = 0.125;
        let lat = TorusGrid::with_spacing(32.0, h).unwrap();
        let u = LatticeField::from_fn(lat, |n| {
            let x = n as f64 * h;
            Cx::new((-x * x / 2.0).exp() * h, 0.3 * h * (-x * x).exp())
                + cis(0.9 * std::f64::consts::PI * n as f64) * (h * 0.4 * (-x * x / 3.0).exp())
        })
        .unwrap();
        let out = TorusGrid::from_length(32.0, 512).unwrap();
        let (psi, phi) = Reconstructor::new(lat, out).unwrap().pair(&u, 0.7).unwrap();
        let s = CoupledState::new(psi, phi).unwrap();
        for kappa in [0.5, 1.0, 3.0, 6.0, 12.0] {
            let a = frequency_tail(&s, kappa);
            let b = lattice_frequency_tail(&u, kappa).unwrap();
            assert!((a - b).abs() < 1e-10, "kappa {kappa}: {a} vs {b}");
        }
    }

    #[test]
    fn gaussian_spatial_tail() {
        let w = 1.0;
        let s = gaussian_state(w);
        let total = spatial_tail(&s, 0.0).unwrap();
        assert!(spatial_tail(&s, 3.0 * w).unwrap() < 1e-3 * total);
        let radii = [0.0, 1.0, 2.0, 5.0, 31.9, 32.0];
        let tails: Vec<f64> = radii
            .iter()
            .map(|&r| spatial_tail(&s, r).unwrap())
            .collect();
        assert!(tails.windows(2).all(|w| w[1] <= w[0]));
        // only the node at x = -L/2 survives
        let edge = s.psi().values()[256].norm_sqr() * s.psi().dx();
        assert!((tails[5] - edge).abs() <= 1e-300 + 1e-12 * edge);
        assert!(spatial_tail(&s, 40.0).is_err());
    }
}
