//! Drift of the frequency-truncated mass `M[P_{<kappa h} u]` along one run.

use crate::error::{Error, Result};
use crate::field::LatticeField;
use crate::fourier::FourierPlan;
use crate::lattice::{evolve_with, mass, split_mass_of_spectrum, DnlsParams, Nonlinearity};
use crate::scalar::{Cx, Real};
use crate::spectral::CutoffSpec;

use super::fit_slope;

/// Ratio between the fit threshold and the mass-conservation floor.
pub const DRIFT_FLOOR_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DriftCurve<T> {
    pub kappas: Vec<T>,
    pub drifts: Vec<T>,
    /// Slope of `log drift` against `log kappa` over the measurable points;
    /// `None` when fewer than two drifts clear the floor.
    pub fitted_exponent: Option<T>,
    /// Largest observed `|M[u(tau)] - M[u(0)]|`.
    pub mass_floor: T,
    pub initial_mass: T,
}

impl<T: Real> DriftCurve<T> {
    /// Points with `drift > 100 * floor`.
    pub fn measurable(&self) -> impl Iterator<Item = (T, T)> + '_ {
        let cut = self.threshold();
        self.kappas
            .iter()
            .zip(&self.drifts)
            .filter(move |(_, d)| **d > cut)
            .map(|(k, d)| (*k, *d))
    }

    pub fn threshold(&self) -> T {
        T::lit(DRIFT_FLOOR_FACTOR) * self.mass_floor
    }

    /// Drifts never increase from one measurable kappa to the next.
    pub fn is_non_increasing_on_tail(&self) -> bool {
        let pts: Vec<(T, T)> = self.measurable().collect();
        pts.windows(2).all(|w| w[1].1 <= w[0].1)
    }
}

/// Options for [`acl_drift_curve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AclOptions<T> {
    pub nonlinearity: Nonlinearity,
    pub dt: T,
    /// Uniform snapshots on `[-T/h^2, T/h^2]`, endpoints included.
    pub snapshot_count: usize,
}

fn is_dyadic<T: Real>(k: T) -> bool {
    let l = k.log2();
    k > T::zero() && (l - l.round()).abs() < T::lit(1e-9)
}

/// Streaming form of [`acl_drift_curve`]: push every snapshot of a run
/// started from `u0`, in any order.
#[derive(Debug)]
pub struct AclAccumulator<T: Real> {
    kappas: Vec<T>,
    cutoffs: Vec<CutoffSpec<T>>,
    plan: FourierPlan<T>,
    buf: Vec<Cx<T>>,
    initial: Vec<T>,
    initial_mass: T,
    drifts: Vec<T>,
    mass_floor: T,
}

impl<T: Real> AclAccumulator<T> {
    /// `kappa h >= 1` makes the projection the identity.
    pub fn new(u0: &LatticeField<T>, h: T, kappas: &[T]) -> Result<Self> {
        if (u0.h() - h).abs() > T::lit(1e-12) * h {
            return Err(Error::GridMismatch(format!(
                "lattice spacing {} does not match h = {h}",
                u0.h()
            )));
        }
        if kappas.is_empty() || !kappas.iter().all(|&k| is_dyadic(k)) {
            return Err(Error::InvalidParameter(
                "kappas must be a non-empty list of powers of two".into(),
            ));
        }
        let cutoffs = kappas
            .iter()
            .map(|&k| CutoffSpec::new((k * h).min(T::one())))
            .collect::<Result<Vec<_>>>()?;
        let m = u0.grid().m();
        let mut acc = Self {
            kappas: kappas.to_vec(),
            cutoffs,
            plan: FourierPlan::new(m),
            buf: vec![Cx::new(T::zero(), T::zero()); m],
            initial: Vec::new(),
            initial_mass: mass(u0),
            drifts: vec![T::zero(); kappas.len()],
            mass_floor: T::zero(),
        };
        acc.initial = acc.truncated(u0);
        Ok(acc)
    }

    fn truncated(&mut self, u: &LatticeField<T>) -> Vec<T> {
        self.buf.copy_from_slice(u.values());
        self.plan.forward(&mut self.buf);
        let total = mass(u);
        self.cutoffs
            .iter()
            .map(|&c| {
                if c.is_identity() {
                    total
                } else {
                    split_mass_of_spectrum(u.grid(), &self.buf, c).0
                }
            })
            .collect()
    }

    pub fn push(&mut self, u: &LatticeField<T>) {
        let now = self.truncated(u);
        for ((d, now), then) in self.drifts.iter_mut().zip(now).zip(&self.initial) {
            *d = d.max((now - *then).abs());
        }
        self.mass_floor = self.mass_floor.max((mass(u) - self.initial_mass).abs());
    }

    pub fn finish(&self) -> DriftCurve<T> {
        let mass_floor = if self.mass_floor == T::zero() {
            T::epsilon() * self.initial_mass
        } else {
            self.mass_floor
        };
        let mut curve = DriftCurve {
            kappas: self.kappas.clone(),
            drifts: self.drifts.clone(),
            fitted_exponent: None,
            mass_floor,
            initial_mass: self.initial_mass,
        };
        let (xs, ys): (Vec<T>, Vec<T>) = curve.measurable().map(|(k, d)| (k.ln(), d.ln())).unzip();
        curve.fitted_exponent = fit_slope(&xs, &ys);
        curve
    }
}

/// One evolution over `[-T/h^2, T/h^2]` measures the drift for every kappa.
pub fn acl_drift_curve<T: Real>(
    u0: &LatticeField<T>,
    h: T,
    t_end: T,
    kappas: &[T],
    options: &AclOptions<T>,
) -> Result<DriftCurve<T>> {
    let mut acc = AclAccumulator::new(u0, h, kappas)?;
    if options.snapshot_count < 2 {
        return Err(Error::InvalidParameter("need at least 2 snapshots".into()));
    }
    let tau_end = t_end / (h * h);
    let params = DnlsParams::new(options.nonlinearity, options.dt, tau_end)?;
    let n = options.snapshot_count;
    let taus: Vec<T> = (0..n)
        .map(|j| -tau_end + T::lit(2.0) * tau_end * T::from_count(j) / T::from_count(n - 1))
        .collect();
    evolve_with(u0, &params, &taus, |_, u| {
        acc.push(u);
        Ok(())
    })?;
    Ok(acc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::scalar::{cis, Cx};

    fn low_band(h: f64) -> LatticeField<f64> {
        let g = TorusGrid::new(256, h).unwrap();
        let m = g.m() as f64;
        LatticeField::from_fn(g, |n| {
            let x = n as f64;
            cis(std::f64::consts::TAU * 2.0 * x / m) * 0.02 + Cx::new(0.01, 0.0)
        })
        .unwrap()
    }

    #[test]
    fn linear_flow_has_no_drift() {
        let h = 0.1;
        let opts = AclOptions {
            nonlinearity: Nonlinearity::Off,
            dt: 0.1,
            snapshot_count: 11,
        };
        let c = acl_drift_curve(&low_band(h), h, 0.05, &[1.0, 2.0, 4.0, 16.0], &opts).unwrap();
        assert!(c.drifts.iter().all(|d| *d <= 1e-12));
        assert_eq!(c.fitted_exponent, None);
    }

    #[test]
    fn identity_cutoff_tracks_total_mass() {
        let h = 0.1;
        let opts = AclOptions {
            nonlinearity: Nonlinearity::Defocusing,
            dt: 0.1,
            snapshot_count: 11,
        };
        let c = acl_drift_curve(&low_band(h), h, 0.05, &[16.0, 32.0], &opts).unwrap();
        assert!(c.drifts.iter().all(|d| *d <= 1e-12));
    }

    #[test]
    fn rejects_bad_kappas_and_spacing() {
        let opts = AclOptions {
            nonlinearity: Nonlinearity::Off,
            dt: 0.1,
            snapshot_count: 5,
        };
        let u = low_band(0.1);
        assert!(acl_drift_curve(&u, 0.1, 0.01, &[3.0], &opts).is_err());
        assert!(acl_drift_curve(&u, 0.1, 0.01, &[], &opts).is_err());
        assert!(acl_drift_curve(&u, 0.2, 0.01, &[4.0], &opts).is_err());
    }
}
