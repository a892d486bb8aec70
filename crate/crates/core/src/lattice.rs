//! Time evolution of the cubic discrete NLS
//! `i du_n/dtau = -(u_{n+1} - 2 u_n + u_{n-1}) +- 2 |u_n|^2 u_n`
//! and its conserved / almost-conserved functionals.

use crate::error::{Error, Result};
use crate::field::LatticeField;
use crate::fourier::FourierPlan;
use crate::grid::TorusGrid;
use crate::scalar::{cis, Cx, Real};
use crate::spectral::{dft, CutoffSpec};

/// Sign convention of the cubic term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nonlinearity {
    /// `+2|u|^2 u`
    Defocusing,
    /// `-2|u|^2 u`
    Focusing,
    /// Cubic term switched off (free lattice Schrodinger flow).
    Off,
}

impl Nonlinearity {
    pub fn strength<T: Real>(self) -> T {
        match self {
            Nonlinearity::Defocusing => T::one(),
            Nonlinearity::Focusing => -T::one(),
            Nonlinearity::Off => T::zero(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Nonlinearity::Defocusing => "defocusing",
            Nonlinearity::Focusing => "focusing",
            Nonlinearity::Off => "linear",
        }
    }
}

impl std::str::FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "defocusing" | "+" => Ok(Self::Defocusing),
            "focusing" | "-" => Ok(Self::Focusing),
            "linear" | "off" => Ok(Self::Off),
            other => Err(Error::InvalidParameter(format!(
                "unknown nonlinearity '{other}'"
            ))),
        }
    }
}

/// Maximum accepted time step in `tau` units.
pub const MAX_DT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DnlsParams<T> {
    pub nonlinearity: Nonlinearity,
    pub dt: T,
    pub t_end: T,
}

impl<T: Real> DnlsParams<T> {
    pub fn new(nonlinearity: Nonlinearity, dt: T, t_end: T) -> Result<Self> {
        if !(dt > T::zero() && dt <= T::lit(MAX_DT)) {
            return Err(Error::InvalidParameter(format!(
                "time step {dt} outside (0, {MAX_DT}]"
            )));
        }
        if !t_end.is_finite() || t_end < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "t_end must be finite and non-negative, got {t_end}"
            )));
        }
        Ok(Self {
            nonlinearity,
            dt,
            t_end,
        })
    }
}

/// Symbol `4 sin^2(theta/2)` of `-Delta_d`.
#[inline]
pub fn lattice_symbol<T: Real>(theta: T) -> T {
    let s = (theta / T::lit(2.0)).sin();
    T::lit(4.0) * s * s
}

/// Exact free flow `u_hat(theta) -> e^{-i tau 4 sin^2(theta/2)} u_hat(theta)`.
pub fn linear_propagate<T: Real>(u: &LatticeField<T>, tau: T) -> LatticeField<T> {
    let mut stepper = LatticeStepper::new(*u.grid(), Nonlinearity::Off);
    let mut out = u.clone();
    stepper.linear(out.values_mut(), tau);
    out
}

/// Exact flow of `i du/dtau = +-2|u|^2 u`: `u_n -> u_n e^{-+2 i |u_n|^2 tau}`.
pub fn nonlinear_propagate<T: Real>(
    u: &LatticeField<T>,
    tau: T,
    nonlinearity: Nonlinearity,
) -> LatticeField<T> {
    let mut out = u.clone();
    phase_rotate(out.values_mut(), tau, nonlinearity.strength());
    out
}

fn phase_rotate<T: Real>(values: &mut [Cx<T>], tau: T, strength: T) {
    if strength == T::zero() {
        return;
    }
    let c = -T::lit(2.0) * strength * tau;
    for z in values {
        *z = *z * cis(c * z.norm_sqr());
    }
}

/// One Strang step `N(dt/2) L(dt) N(dt/2)`.
pub fn strang_step<T: Real>(
    u: &LatticeField<T>,
    dt: T,
    nonlinearity: Nonlinearity,
) -> LatticeField<T> {
    let mut stepper = LatticeStepper::new(*u.grid(), nonlinearity);
    let mut out = u.clone();
    stepper.step(out.values_mut(), dt);
    out
}

/// Reusable split-step integrator bound to one lattice.
#[derive(Debug)]
pub struct LatticeStepper<T: Real> {
    grid: TorusGrid<T>,
    nonlinearity: Nonlinearity,
    plan: FourierPlan<T>,
    symbol: Vec<T>,
    cached: Option<(T, Vec<Cx<T>>)>,
}

impl<T: Real> LatticeStepper<T> {
    pub fn new(grid: TorusGrid<T>, nonlinearity: Nonlinearity) -> Self {
        let symbol = (0..grid.m())
            .map(|j| lattice_symbol(grid.theta(j)))
            .collect();
        Self {
            grid,
            nonlinearity,
            plan: FourierPlan::new(grid.m()),
            symbol,
            cached: None,
        }
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    fn refresh_multiplier(&mut self, tau: T) {
        // phases for the regular step size stay cached; partial steps rebuild them
        if !matches!(&self.cached, Some((t, _)) if *t == tau) {
            let inv_m = T::one() / T::from_count(self.grid.m());
            let mult = self.symbol.iter().map(|&w| cis(-tau * w) * inv_m).collect();
            self.cached = Some((tau, mult));
        }
    }

    pub fn linear(&mut self, values: &mut [Cx<T>], tau: T) {
        self.plan.forward(values);
        self.refresh_multiplier(tau);
        let mult = &self.cached.as_ref().expect("multiplier cached").1;
        for (z, w) in values.iter_mut().zip(mult) {
            *z = *z * *w;
        }
        self.plan.inverse(values);
    }

    pub fn step(&mut self, values: &mut [Cx<T>], dt: T) {
        let half = dt / T::lit(2.0);
        let g = self.nonlinearity.strength();
        phase_rotate(values, half, g);
        self.linear(values, dt);
        phase_rotate(values, half, g);
    }
}

/// States of one run at increasing snapshot times `taus`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSeries<T> {
    pub taus: Vec<T>,
    pub states: Vec<LatticeField<T>>,
    pub params: DnlsParams<T>,
}

impl<T: Real> SnapshotSeries<T> {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Largest relative deviation of the l2 mass from the first snapshot.
    pub fn max_relative_mass_drift(&self) -> T {
        let Some(first) = self.states.first() else {
            return T::zero();
        };
        let m0 = mass(first);
        if m0 == T::zero() {
            return self.states.iter().map(mass).fold(T::zero(), T::max);
        }
        self.states
            .iter()
            .map(|s| ((mass(s) - m0) / m0).abs())
            .fold(T::zero(), T::max)
    }
}

const BLOWUP_CHECK_STRIDE: usize = 256;

/// Drives `stepper` from `tau = 0` through the (signed) snapshot times,
/// calling `observe(tau, state)` at each of them in increasing order of
/// `|tau|` on each side of zero. Negative times run with `-dt`.
///
/// Snapshots are visited as: all non-negative times ascending, then all
/// negative times descending (both starting from `u0`).
pub fn evolve_with<T: Real>(
    u0: &LatticeField<T>,
    params: &DnlsParams<T>,
    snapshot_taus: &[T],
    mut observe: impl FnMut(T, &LatticeField<T>) -> Result<()>,
) -> Result<()> {
    if !u0.all_finite() {
        return Err(Error::Blowup {
            time: 0.0,
            detail: "initial data not finite".into(),
        });
    }
    for &t in snapshot_taus {
        if !t.is_finite() || t.abs() > params.t_end * (T::one() + T::lit(1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "snapshot time {t} outside [-{}, {}]",
                params.t_end, params.t_end
            )));
        }
    }
    let mut forward: Vec<T> = snapshot_taus
        .iter()
        .copied()
        .filter(|t| *t >= T::zero())
        .collect();
    let mut backward: Vec<T> = snapshot_taus
        .iter()
        .copied()
        .filter(|t| *t < T::zero())
        .collect();
    forward.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    backward.sort_by(|a, b| b.partial_cmp(a).expect("finite"));

    let mut stepper = LatticeStepper::new(*u0.grid(), params.nonlinearity);
    for (targets, dt) in [(forward, params.dt), (backward, -params.dt)] {
        if targets.is_empty() {
            continue;
        }
        let mut state = u0.clone();
        let mut steps_done: u64 = 0;
        let mut since_check = 0usize;
        for target in targets {
            // full steps land on tau = steps * dt; the remainder is a partial step
            let n_full = ((target / dt).to_f64_lossy() * (1.0 + 1e-14))
                .floor()
                .max(0.0) as u64;
            while steps_done < n_full {
                stepper.step(state.values_mut(), dt);
                steps_done += 1;
                since_check += 1;
                if since_check >= BLOWUP_CHECK_STRIDE {
                    since_check = 0;
                    check_finite(&state, T::lit(steps_done as f64) * dt)?;
                }
            }
            let reached = T::lit(steps_done as f64) * dt;
            let rest = target - reached;
            let snapshot = if rest.abs() > T::epsilon() * T::lit(64.0) * target.abs().max(T::one())
            {
                let mut partial = state.clone();
                stepper.step(partial.values_mut(), rest);
                partial
            } else {
                state.clone()
            };
            check_finite(&snapshot, target)?;
            observe(target, &snapshot)?;
        }
    }
    Ok(())
}

fn check_finite<T: Real>(state: &LatticeField<T>, tau: T) -> Result<()> {
    match state
        .values()
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        None => Ok(()),
        Some(i) => Err(Error::Blowup {
            time: tau.to_f64_lossy(),
            detail: format!("non-finite lattice value at site {i}"),
        }),
    }
}

/// Runs the split-step solver and keeps every snapshot, sorted by time.
pub fn evolve<T: Real>(
    u0: &LatticeField<T>,
    params: &DnlsParams<T>,
    snapshot_taus: &[T],
) -> Result<SnapshotSeries<T>> {
    let mut collected: Vec<(T, LatticeField<T>)> = Vec::with_capacity(snapshot_taus.len());
    evolve_with(u0, params, snapshot_taus, |tau, s| {
        collected.push((tau, s.clone()));
        Ok(())
    })?;
    collected.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let (taus, states) = collected.into_iter().unzip();
    Ok(SnapshotSeries {
        taus,
        states,
        params: *params,
    })
}

/// `sum_n |u_n|^2`
pub fn mass<T: Real>(u: &LatticeField<T>) -> T {
    u.values()
        .iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// `sum_n |u_{n+1} - u_n|^2 +- |u_n|^4`, periodic.
pub fn energy<T: Real>(u: &LatticeField<T>, nonlinearity: Nonlinearity) -> T {
    let v = u.values();
    let g = nonlinearity.strength::<T>();
    let m = v.len();
    (0..m).fold(T::zero(), |acc, n| {
        let next = v[(n + 1) % m];
        let a2 = v[n].norm_sqr();
        acc + (next - v[n]).norm_sqr() + g * a2 * a2
    })
}

/// `M[P_{<lambda} u]`, the mass kept by the sharp cutoff.
pub fn truncated_mass<T: Real>(u: &LatticeField<T>, cutoff: CutoffSpec<T>) -> T {
    split_mass(u, cutoff).0
}

/// `(M[P_{<lambda} u], M[P_{>=lambda} u])`
pub fn split_mass<T: Real>(u: &LatticeField<T>, cutoff: CutoffSpec<T>) -> (T, T) {
    let spec = dft(u);
    split_mass_of_spectrum(spec.grid(), spec.coeffs(), cutoff)
}

pub(crate) fn split_mass_of_spectrum<T: Real>(
    grid: &TorusGrid<T>,
    coeffs: &[Cx<T>],
    cutoff: CutoffSpec<T>,
) -> (T, T) {
    let (mut inside, mut outside) = (T::zero(), T::zero());
    for (j, c) in coeffs.iter().enumerate() {
        if cutoff.contains(grid.theta(j)) {
            inside = inside + c.norm_sqr();
        } else {
            outside = outside + c.norm_sqr();
        }
    }
    let inv_m = T::one() / T::from_count(grid.m());
    (inside * inv_m, outside * inv_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type C = Cx<f64>;

    fn grid(m: usize) -> TorusGrid<f64> {
        TorusGrid::new(m, 0.1).unwrap()
    }

    fn plane_wave(m: usize, k: i64, amp: f64) -> LatticeField<f64> {
        let theta = 2.0 * PI * k as f64 / m as f64;
        LatticeField::from_fn(grid(m), |n| cis(theta * n as f64) * amp).unwrap()
    }

    fn noisy(m: usize) -> LatticeField<f64> {
        LatticeField::from_fn(grid(m), |n| {
            let x = n as f64;
            C::new((0.7 * x).sin() * 0.3 + 0.1, (1.3 * x + 0.2).cos() * 0.2)
        })
        .unwrap()
    }

    #[test]
    fn linear_flow_of_plane_wave() {
        let m = 64;
        let k = 5;
        let theta = 2.0 * PI * k as f64 / m as f64;
        let u = plane_wave(m, k, 1.0);
        assert!(linear_propagate(&u, 0.0).max_abs_diff(&u) < 1e-15);
        let tau = 3.7;
        let out = linear_propagate(&u, tau);
        let w = 4.0 * (theta / 2.0).sin().powi(2);
        let expected = LatticeField::from_fn(grid(m), |n| cis(theta * n as f64 - w * tau)).unwrap();
        assert!(out.max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn linear_flow_is_unitary() {
        let u = noisy(128);
        let out = linear_propagate(&u, 5.3);
        assert!((mass(&out) - mass(&u)).abs() <= 1e-13 * mass(&u));
    }

    #[test]
    fn nonlinear_flow_single_site() {
        let mut v = vec![C::new(0.0, 0.0); 8];
        v[0] = C::new(1.0, 0.0);
        let u = LatticeField::new(grid(8), v).unwrap();
        let out = nonlinear_propagate(&u, PI, Nonlinearity::Defocusing);
        assert!((out.values()[0] - C::new(1.0, 0.0)).norm() < 1e-14);
        let out = nonlinear_propagate(&u, 0.25 * PI, Nonlinearity::Defocusing);
        assert!((out.values()[0] - C::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(nonlinear_propagate(&u, 0.0, Nonlinearity::Focusing), u);
    }

    #[test]
    fn nonlinear_flow_preserves_moduli() {
        let u = noisy(64);
        let out = nonlinear_propagate(&u, 2.9, Nonlinearity::Focusing);
        for (a, b) in out.values().iter().zip(u.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn strang_step_on_zero_and_plane_wave() {
        let z = LatticeField::zeros(grid(32));
        assert_eq!(strang_step(&z, 0.05, Nonlinearity::Defocusing), z);

        let (m, k, a) = (64, 3, 0.8);
        let theta = 2.0 * PI * k as f64 / m as f64;
        for nl in [Nonlinearity::Defocusing, Nonlinearity::Focusing] {
            let omega = 4.0 * (theta / 2.0).sin().powi(2) + nl.strength::<f64>() * 2.0 * a * a;
            let out = strang_step(&plane_wave(m, k, a), 0.05, nl);
            let exact =
                LatticeField::from_fn(grid(m), |n| cis(theta * n as f64 - omega * 0.05) * a)
                    .unwrap();
            assert!(out.max_abs_diff(&exact) < 1e-12);
        }
    }

    #[test]
    fn mass_and_energy_of_delta() {
        let z = LatticeField::zeros(grid(16));
        assert_eq!(mass(&z), 0.0);
        assert_eq!(energy(&z, Nonlinearity::Defocusing), 0.0);
        let mut v = vec![C::new(0.0, 0.0); 16];
        v[3] = C::new(0.0, 1.0);
        let d = LatticeField::new(grid(16), v).unwrap();
        assert_eq!(mass(&d), 1.0);
        assert!((energy(&d, Nonlinearity::Defocusing) - 3.0).abs() < 1e-15);
        assert!((energy(&d, Nonlinearity::Focusing) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mass_matches_spectral_side() {
        let u = noisy(256);
        let spec = dft(&u);
        assert!((mass(&u) - spec.mass()).abs() <= 1e-12 * mass(&u));
    }

    #[test]
    fn truncated_mass_cases() {
        let u = noisy(128);
        let id = CutoffSpec::new(1.0).unwrap();
        assert!((truncated_mass(&u, id) - mass(&u)).abs() <= 1e-12 * mass(&u));

        // theta = pi/2 is node m/4
        let quarter = plane_wave(128, 32, 1.0);
        for lambda in [0.1, 0.5, 0.999] {
            assert!(truncated_mass(&quarter, CutoffSpec::new(lambda).unwrap()) < 1e-20);
        }

        let c = CutoffSpec::new(0.3).unwrap();
        let (inside, outside) = split_mass(&u, c);
        assert!((inside + outside - mass(&u)).abs() <= 1e-12 * mass(&u));
    }

    #[test]
    fn evolve_lands_on_snapshots() {
        let m = 64;
        let (k, a) = (7, 0.5);
        let theta = 2.0 * PI * k as f64 / m as f64;
        let params = DnlsParams::new(Nonlinearity::Defocusing, 0.05, 10.0).unwrap();
        let taus = [-9.99, -0.013, 0.0, 0.7, 3.333, 10.0];
        let series = evolve(&plane_wave(m, k, a), &params, &taus).unwrap();
        assert_eq!(series.taus, taus.to_vec());
        let omega = 4.0 * (theta / 2.0).sin().powi(2) + 2.0 * a * a;
        for (tau, s) in series.taus.iter().zip(&series.states) {
            let exact = LatticeField::from_fn(grid(m), |n| cis(theta * n as f64 - omega * tau) * a)
                .unwrap();
            assert!(s.max_abs_diff(&exact) < 1e-10, "tau {tau}");
        }
    }

    #[test]
    fn evolve_rejects_out_of_horizon_and_blowup() {
        let params = DnlsParams::new(Nonlinearity::Defocusing, 0.05, 1.0).unwrap();
        let u = noisy(16);
        assert!(evolve(&u, &params, &[1.5]).is_err());
        assert!(DnlsParams::new(Nonlinearity::Defocusing, 0.6, 1.0).is_err());

        let mut v = u.values().to_vec();
        v[2] = C::new(1e200, 0.0);
        let huge = LatticeField::new(grid(16), v).unwrap();
        let err = evolve(&huge, &params, &[1.0]).unwrap_err();
        assert!(matches!(err, Error::Blowup { .. }));
    }

    #[test]
    fn nonlinearity_parses() {
        assert_eq!(
            "focusing".parse::<Nonlinearity>().unwrap(),
            Nonlinearity::Focusing
        );
        assert!("sideways".parse::<Nonlinearity>().is_err());
    }
}
