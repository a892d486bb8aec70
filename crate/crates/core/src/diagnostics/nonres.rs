//! The fast-oscillating cross terms `e^{-8i t/h^2} (phi^h)^2 conj(psi^h)` and
//! `e^{+8i t/h^2} (psi^h)^2 conj(phi^h)`, integrated in time.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{ContinuumField, LatticeField};
use crate::grid::TorusGrid;
use crate::lattice::SnapshotSeries;
use crate::scalar::{cis, Cx, Real};
use crate::spectral::Reconstructor;

/// Samples per period of the `8 tau` phase the quadrature must resolve.
pub const SAMPLES_PER_PERIOD: f64 = 20.0;

/// Largest snapshot spacing in `tau` that resolves the `e^{8 i tau}` phase.
pub fn max_tau_spacing<T: Real>() -> T {
    T::TAU() / (T::lit(8.0) * T::lit(SAMPLES_PER_PERIOD))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedTerm {
    /// `e^{-8 i tau} (phi^h)^2 conj(psi^h)`
    PsiMixed,
    /// `e^{+8 i tau} (psi^h)^2 conj(phi^h)`
    PhiMixed,
}

impl MixedTerm {
    pub fn name(self) -> &'static str {
        match self {
            MixedTerm::PsiMixed => "psi_mixed",
            MixedTerm::PhiMixed => "phi_mixed",
        }
    }
}

impl FromStr for MixedTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psi_mixed" => Ok(MixedTerm::PsiMixed),
            "phi_mixed" => Ok(MixedTerm::PhiMixed),
            other => Err(Error::InvalidParameter(format!(
                "unknown mixed term '{other}'"
            ))),
        }
    }
}

/// `L^2` norms of the time integrals at the last pushed time, with and
/// without the oscillating phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonresonanceValues<T> {
    pub t_end: T,
    pub psi_mixed: T,
    pub phi_mixed: T,
    pub psi_control: T,
    pub phi_control: T,
}

impl<T: Real> NonresonanceValues<T> {
    pub fn get(&self, term: MixedTerm) -> T {
        match term {
            MixedTerm::PsiMixed => self.psi_mixed,
            MixedTerm::PhiMixed => self.phi_mixed,
        }
    }

    pub fn control(&self, term: MixedTerm) -> T {
        match term {
            MixedTerm::PsiMixed => self.psi_control,
            MixedTerm::PhiMixed => self.phi_control,
        }
    }
}

/// Trapezoid integration in `t = h^2 tau` of both cross terms and their
/// phase-free controls, fed one reconstructed snapshot at a time for
/// `tau = 0, tau_1, tau_2, ...` ascending.
#[derive(Debug, Clone)]
pub struct NonresonanceAccumulator<T> {
    h: T,
    grid: Option<TorusGrid<T>>,
    last: Option<(T, [Vec<Cx<T>>; 4])>,
    integrals: [Vec<Cx<T>>; 4],
}

impl<T: Real> NonresonanceAccumulator<T> {
    pub fn new(h: T) -> Self {
        Self {
            h,
            grid: None,
            last: None,
            integrals: Default::default(),
        }
    }

    pub fn push(
        &mut self,
        tau: T,
        psi_h: &ContinuumField<T>,
        phi_h: &ContinuumField<T>,
    ) -> Result<()> {
        if psi_h.grid() != phi_h.grid() {
            return Err(Error::GridMismatch(
                "psi^h and phi^h on different grids".into(),
            ));
        }
        let grid = *psi_h.grid();
        match (&self.grid, &self.last) {
            (None, _) => {
                if tau != T::zero() {
                    return Err(Error::InvalidParameter(format!(
                        "time integral starts at tau = 0, first snapshot at {tau}"
                    )));
                }
                self.grid = Some(grid);
                self.integrals =
                    std::array::from_fn(|_| vec![Cx::new(T::zero(), T::zero()); grid.m()]);
            }
            (Some(g), Some((prev, _))) => {
                if *g != grid {
                    return Err(Error::GridMismatch("snapshot grid changed".into()));
                }
                let gap = tau - *prev;
                let required = max_tau_spacing::<T>();
                if !(gap > T::zero()) {
                    return Err(Error::InvalidParameter(
                        "snapshot times must increase".into(),
                    ));
                }
                if gap > required * (T::one() + T::lit(1e-9)) {
                    return Err(Error::SpacingTooCoarse {
                        spacing: gap.to_f64_lossy(),
                        required: required.to_f64_lossy(),
                    });
                }
            }
            (Some(_), None) => unreachable!("grid is set together with the first sample"),
        }

        let down = cis(-T::lit(8.0) * tau);
        let up = down.conj();
        let n = grid.m();
        let mut samples: [Vec<Cx<T>>; 4] = std::array::from_fn(|_| Vec::with_capacity(n));
        for (a, b) in psi_h.values().iter().zip(phi_h.values()) {
            let psi_term = b * b * a.conj();
            let phi_term = a * a * b.conj();
            samples[0].push(psi_term * down);
            samples[1].push(phi_term * up);
            samples[2].push(psi_term);
            samples[3].push(phi_term);
        }
        if let Some((prev, old)) = &self.last {
            let half_dt = (tau - *prev) * self.h * self.h / T::lit(2.0);
            for (acc, (new, old)) in self.integrals.iter_mut().zip(samples.iter().zip(old)) {
                for (s, (x, y)) in acc.iter_mut().zip(new.iter().zip(old)) {
                    *s = *s + (x + y) * half_dt;
                }
            }
        }
        self.last = Some((tau, samples));
        Ok(())
    }

    pub fn finish(&self) -> Result<NonresonanceValues<T>> {
        let (Some(grid), Some((tau, _))) = (&self.grid, &self.last) else {
            return Err(Error::InvalidParameter("no snapshots pushed".into()));
        };
        let norm = |v: &[Cx<T>]| {
            (v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()) * grid.spacing()).sqrt()
        };
        Ok(NonresonanceValues {
            t_end: *tau * self.h * self.h,
            psi_mixed: norm(&self.integrals[0]),
            phi_mixed: norm(&self.integrals[1]),
            psi_control: norm(&self.integrals[2]),
            phi_control: norm(&self.integrals[3]),
        })
    }
}

/// Reconstructs at twice the lattice resolution, which holds the cubic
/// products without aliasing.
pub fn product_grid<T: Real>(lattice: &TorusGrid<T>) -> Result<TorusGrid<T>> {
    TorusGrid::new(2 * lattice.m(), lattice.spacing() / T::lit(2.0))
}

/// Feeds lattice snapshots at `tau >= 0` through the reconstruction.
#[derive(Debug)]
pub struct LatticeNonresonance<T: Real> {
    reconstructor: Reconstructor<T>,
    acc: NonresonanceAccumulator<T>,
}

impl<T: Real> LatticeNonresonance<T> {
    pub fn new(lattice: TorusGrid<T>) -> Result<Self> {
        Ok(Self {
            reconstructor: Reconstructor::new(lattice, product_grid(&lattice)?)?,
            acc: NonresonanceAccumulator::new(lattice.spacing()),
        })
    }

    pub fn push(&mut self, tau: T, u: &LatticeField<T>) -> Result<()> {
        let (psi, phi) = self.reconstructor.pair(u, tau)?;
        self.acc.push(tau, &psi, &phi)
    }

    pub fn finish(&self) -> Result<NonresonanceValues<T>> {
        self.acc.finish()
    }
}

/// `|| int_0^T e^{-+8 i s/h^2} F(s) ds ||_{L^2}` over the non-negative
/// snapshots of `series`, with `T` the last snapshot time.
pub fn nonresonance_integral<T: Real>(
    series: &SnapshotSeries<T>,
    h: T,
    term: MixedTerm,
) -> Result<T> {
    Ok(nonresonance_values(series, h)?.get(term))
}

pub fn nonresonance_values<T: Real>(
    series: &SnapshotSeries<T>,
    h: T,
) -> Result<NonresonanceValues<T>> {
    let first = series
        .states
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty series".into()))?;
    if (first.h() - h).abs() > T::lit(1e-12) * h {
        return Err(Error::GridMismatch(format!(
            "lattice spacing {} does not match h = {h}",
            first.h()
        )));
    }
    let mut acc = LatticeNonresonance::new(*first.grid())?;
    for (tau, u) in series.taus.iter().zip(&series.states) {
        if *tau >= T::zero() {
            acc.push(*tau, u)?;
        }
    }
    acc.finish()
}
