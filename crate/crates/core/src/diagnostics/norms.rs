//! Mixed space-time Lebesgue norms `L^q_tau l^p_n` and their continuum
//! counterparts.

use crate::error::{Error, Result};
use crate::field::{ContinuumField, LatticeField};
use crate::lattice::{mass, SnapshotSeries};
use crate::scalar::{Cx, Real};

/// Exponent pair `(q, p)`: `q` in time, `p` in space. Either may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec<T> {
    q: T,
    p: T,
}

impl<T: Real> NormSpec<T> {
    pub fn new(q: T, p: T) -> Result<Self> {
        for (name, e) in [("q", q), ("p", p)] {
            if e.is_nan() || e < T::one() {
                return Err(Error::InvalidParameter(format!(
                    "exponent {name} must lie in [1, inf], got {e}"
                )));
            }
        }
        Ok(Self { q, p })
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn p(&self) -> T {
        self.p
    }

    /// `2/q + 1/p == 1/2`, the Schroedinger scaling line. Informational only.
    pub fn is_admissible(&self) -> bool {
        let inv = |e: T| {
            if e.is_infinite() {
                T::zero()
            } else {
                e.recip()
            }
        };
        let lhs = T::lit(2.0) * inv(self.q) + inv(self.p);
        (lhs - T::lit(0.5)).abs() <= T::lit(1e-12)
    }

    /// `h^{1 - 1/p - 2/q}`, the factor relating lattice and continuum norms.
    pub fn scaling_power(&self, h: T) -> T {
        let inv = |e: T| {
            if e.is_infinite() {
                T::zero()
            } else {
                e.recip()
            }
        };
        h.powf(T::one() - inv(self.p) - T::lit(2.0) * inv(self.q))
    }
}

/// `(weight * sum |z|^p)^{1/p}`, or `max |z|` for `p = inf`.
pub fn weighted_lp<T: Real>(values: &[Cx<T>], p: T, weight: T) -> T {
    if p.is_infinite() {
        return values.iter().fold(T::zero(), |acc, z| acc.max(z.norm()));
    }
    let two = T::lit(2.0);
    let s = if p == two {
        values.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    } else {
        let half = p / two;
        values
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr().powf(half))
    };
    (s * weight).powf(p.recip())
}

/// `||u||_{l^p}` on the lattice (unit weights).
pub fn lattice_lp<T: Real>(u: &LatticeField<T>, p: T) -> T {
    weighted_lp(u.values(), p, T::one())
}

/// `||f||_{L^p}` by `dx`-weighted quadrature.
pub fn continuum_lp<T: Real>(f: &ContinuumField<T>, p: T) -> T {
    weighted_lp(f.values(), p, f.dx())
}

/// Collects one spatial norm per snapshot in any order, then integrates in
/// time with the trapezoid rule once all samples are in.
#[derive(Debug, Clone)]
pub struct SpacetimeAccumulator<T> {
    spec: NormSpec<T>,
    samples: Vec<(T, T)>,
}

impl<T: Real> SpacetimeAccumulator<T> {
    pub fn new(spec: NormSpec<T>) -> Self {
        Self {
            spec,
            samples: Vec::new(),
        }
    }

    pub fn spec(&self) -> NormSpec<T> {
        self.spec
    }

    /// Records an already computed spatial norm at time `tau`.
    pub fn push_spatial(&mut self, tau: T, spatial: T) {
        self.samples.push((tau, spatial));
    }

    pub fn push_lattice(&mut self, tau: T, u: &LatticeField<T>) {
        self.push_spatial(tau, lattice_lp(u, self.spec.p));
    }

    pub fn push_continuum(&mut self, tau: T, f: &ContinuumField<T>) {
        self.push_spatial(tau, continuum_lp(f, self.spec.p));
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn finish(&self) -> Result<T> {
        let mut s = self.samples.clone();
        s.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite times"));
        time_norm(&s, self.spec.q)
    }
}

fn time_norm<T: Real>(samples: &[(T, T)], q: T) -> Result<T> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "space-time norm needs at least 2 snapshots, got {}",
            samples.len()
        )));
    }
    let step = (samples[samples.len() - 1].0 - samples[0].0) / T::from_count(samples.len() - 1);
    if !(step > T::zero()) {
        return Err(Error::InvalidParameter(
            "snapshot times must be distinct".into(),
        ));
    }
    let tol = step * T::lit(1e-8);
    if samples
        .windows(2)
        .any(|w| ((w[1].0 - w[0].0) - step).abs() > tol)
    {
        return Err(Error::InvalidParameter(
            "space-time norm needs uniformly spaced snapshots".into(),
        ));
    }
    if q.is_infinite() {
        return Ok(samples.iter().fold(T::zero(), |acc, s| acc.max(s.1)));
    }
    let vals: Vec<T> = samples.iter().map(|s| s.1.powf(q)).collect();
    let inner: T = vals[1..vals.len() - 1]
        .iter()
        .fold(T::zero(), |a, &v| a + v);
    let ends = (vals[0] + vals[vals.len() - 1]) / T::lit(2.0);
    Ok(((inner + ends) * step).powf(q.recip()))
}

/// `||u||_{L^q_tau l^p_n}` over the time span of `series`.
pub fn spacetime_norm<T: Real>(series: &SnapshotSeries<T>, spec: NormSpec<T>) -> Result<T> {
    let mut acc = SpacetimeAccumulator::new(spec);
    for (tau, u) in series.taus.iter().zip(&series.states) {
        acc.push_lattice(*tau, u);
    }
    acc.finish()
}

/// `||f||_{L^q_t L^p_x}` over time-stamped continuum snapshots.
pub fn continuum_spacetime_norm<T: Real>(
    snapshots: &[(T, ContinuumField<T>)],
    spec: NormSpec<T>,
) -> Result<T> {
    let mut acc = SpacetimeAccumulator::new(spec);
    for (t, f) in snapshots {
        acc.push_continuum(*t, f);
    }
    acc.finish()
}

/// Strichartz norms of one run divided by `||u(0)||_{l^2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrichartzReport<T> {
    pub h: T,
    pub t_end: T,
    pub l2_initial: T,
    /// `||u||_{L^6_tau l^6_n}`
    pub l6: T,
    /// `||u||_{L^4_tau l^inf_n}`
    pub l4_linf: T,
    pub l6_ratio: T,
    pub l4_linf_ratio: T,
}

/// Streams snapshots into the two Strichartz accumulators.
#[derive(Debug, Clone)]
pub struct StrichartzAccumulator<T> {
    l6: SpacetimeAccumulator<T>,
    l4: SpacetimeAccumulator<T>,
    l2_initial: Option<T>,
}

impl<T: Real> Default for StrichartzAccumulator<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> StrichartzAccumulator<T> {
    pub fn new() -> Self {
        let six = T::lit(6.0);
        Self {
            l6: SpacetimeAccumulator::new(NormSpec { q: six, p: six }),
            l4: SpacetimeAccumulator::new(NormSpec {
                q: T::lit(4.0),
                p: T::infinity(),
            }),
            l2_initial: None,
        }
    }

    pub fn push(&mut self, tau: T, u: &LatticeField<T>) {
        if tau == T::zero() {
            self.l2_initial = Some(mass(u).sqrt());
        }
        self.l6.push_lattice(tau, u);
        self.l4.push_lattice(tau, u);
    }

    pub fn finish(&self, h: T, t_end: T) -> Result<StrichartzReport<T>> {
        let l2_initial = self.l2_initial.ok_or_else(|| {
            Error::InvalidParameter("Strichartz report needs a snapshot at tau = 0".into())
        })?;
        let l6 = self.l6.finish()?;
        let l4_linf = self.l4.finish()?;
        let ratio = |v: T| {
            if l2_initial > T::zero() {
                v / l2_initial
            } else {
                T::zero()
            }
        };
        Ok(StrichartzReport {
            h,
            t_end,
            l2_initial,
            l6,
            l4_linf,
            l6_ratio: ratio(l6),
            l4_linf_ratio: ratio(l4_linf),
        })
    }
}

/// Expects the series to cover `[-T/h^2, T/h^2]` with uniform spacing.
pub fn strichartz_report<T: Real>(
    series: &SnapshotSeries<T>,
    h: T,
    t_end: T,
) -> Result<StrichartzReport<T>> {
    let mut acc = StrichartzAccumulator::new();
    for (tau, u) in series.taus.iter().zip(&series.states) {
        acc.push(*tau, u);
    }
    acc.finish(h, t_end)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::lattice::{DnlsParams, Nonlinearity};
    use crate::scalar::cis;

    fn wave(m: usize, amp: f64) -> LatticeField<f64> {
        let g = TorusGrid::new(m, 0.1).unwrap();
        LatticeField::from_fn(g, |n| cis(0.3 * n as f64) * amp).unwrap()
    }

    fn constant_series(m: usize, amp: f64, taus: &[f64]) -> SnapshotSeries<f64> {
        SnapshotSeries {
            taus: taus.to_vec(),
            states: taus.iter().map(|_| wave(m, amp)).collect(),
            params: DnlsParams::new(Nonlinearity::Off, 0.1, 10.0).unwrap(),
        }
    }

    #[test]
    fn rejects_exponents_below_one() {
        assert!(NormSpec::new(0.5, 2.0).is_err());
        assert!(NormSpec::new(2.0, f64::NAN).is_err());
        assert!(NormSpec::new(f64::INFINITY, 1.0).is_ok());
    }

    #[test]
    fn admissibility() {
        assert!(NormSpec::new(f64::INFINITY, 2.0).unwrap().is_admissible());
        assert!(NormSpec::new(4.0, f64::INFINITY).unwrap().is_admissible());
        assert!(NormSpec::new(6.0, 6.0).unwrap().is_admissible());
        assert!(!NormSpec::new(4.0, 4.0).unwrap().is_admissible());
        let h = 0.1f64;
        assert!((NormSpec::new(6.0, 6.0).unwrap().scaling_power(h) - h.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_plane_wave_l6() {
        let (m, amp) = (64, 0.7);
        let taus: Vec<f64> = (0..=40).map(|j| j as f64 * 0.25).collect();
        let s = constant_series(m, amp, &taus);
        let got = spacetime_norm(&s, NormSpec::new(6.0, 6.0).unwrap()).unwrap();
        let want = amp * (m as f64).powf(1.0 / 6.0) * 10f64.powf(1.0 / 6.0);
        assert!((got - want).abs() < 1e-12 * want);
        let sup = spacetime_norm(&s, NormSpec::new(f64::INFINITY, 2.0).unwrap()).unwrap();
        assert!((sup - amp * (m as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_short_or_uneven_series() {
        let spec = NormSpec::new(2.0, 2.0).unwrap();
        assert!(spacetime_norm(&constant_series(8, 1.0, &[0.0]), spec).is_err());
        assert!(spacetime_norm(&constant_series(8, 1.0, &[0.0, 1.0, 3.0]), spec).is_err());
    }

    #[test]
    fn lp_values() {
        let z = [Cx::new(3.0, 4.0), Cx::new(0.0, 0.0), Cx::new(-1.0, 0.0)];
        assert_eq!(weighted_lp(&z, f64::INFINITY, 1.0), 5.0);
        assert!((weighted_lp(&z, 1.0, 1.0) - 6.0).abs() < 1e-14);
        assert!((weighted_lp(&z, 2.0, 0.5) - 13f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zero_data_gives_zero_report() {
        let taus: Vec<f64> = (-4..=4).map(|j| j as f64).collect();
        let s = constant_series(16, 0.0, &taus);
        let r = strichartz_report(&s, 0.1, 0.04).unwrap();
        assert_eq!((r.l6_ratio, r.l4_linf_ratio), (0.0, 0.0));
    }
}
