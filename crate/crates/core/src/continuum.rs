//! Split-step reference solver for the coupled cubic NLS system
//!
//! ```text
//! i psi_t = -psi_xx +- 2(|psi|^2 + 2|phi|^2) psi
//! i phi_t = +phi_xx +- 2(|phi|^2 + 2|psi|^2) phi
//! ```
//!
//! on a periodic grid. Note the opposite sign of the Laplacian in the
//! second equation.

use crate::error::{Error, Result};
use crate::field::ContinuumField;
use crate::fourier::FourierPlan;
use crate::grid::TorusGrid;
use crate::lattice::Nonlinearity;
use crate::scalar::{cis, is_finite, Cx, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState<T> {
    psi: ContinuumField<T>,
    phi: ContinuumField<T>,
}

impl<T: Real> CoupledState<T> {
    pub fn new(psi: ContinuumField<T>, phi: ContinuumField<T>) -> Result<Self> {
        if psi.grid() != phi.grid() {
            return Err(Error::GridMismatch(
                "psi and phi must share one grid".into(),
            ));
        }
        Ok(Self { psi, phi })
    }

    pub fn zeros(grid: TorusGrid<T>) -> Self {
        Self {
            psi: ContinuumField::zeros(grid),
            phi: ContinuumField::zeros(grid),
        }
    }

    pub fn psi(&self) -> &ContinuumField<T> {
        &self.psi
    }

    pub fn phi(&self) -> &ContinuumField<T> {
        &self.phi
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        self.psi.grid()
    }

    pub fn into_parts(self) -> (ContinuumField<T>, ContinuumField<T>) {
        (self.psi, self.phi)
    }

    fn raw_mut(&mut self) -> (Vec<Cx<T>>, Vec<Cx<T>>) {
        let grid = *self.grid();
        let psi = std::mem::replace(&mut self.psi, ContinuumField::zeros(grid)).into_values();
        let phi = std::mem::replace(&mut self.phi, ContinuumField::zeros(grid)).into_values();
        (psi, phi)
    }

    fn from_raw(grid: TorusGrid<T>, psi: Vec<Cx<T>>, phi: Vec<Cx<T>>) -> Self {
        Self {
            psi: ContinuumField::from_raw(grid, psi, None),
            phi: ContinuumField::from_raw(grid, phi, None),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.psi.all_finite() && self.phi.all_finite()
    }
}

/// `psi_hat -> e^{-i t xi^2} psi_hat`, `phi_hat -> e^{+i t xi^2} phi_hat`.
pub fn nls_linear_step<T: Real>(state: &CoupledState<T>, t: T) -> CoupledState<T> {
    let mut stepper = CoupledStepper::new(*state.grid(), Nonlinearity::Off);
    let mut out = state.clone();
    let (mut psi, mut phi) = out.raw_mut();
    stepper.linear(&mut psi, &mut phi, t);
    CoupledState::from_raw(*state.grid(), psi, phi)
}

/// Exact pointwise phase flow of the coupled cubic terms.
pub fn nls_nonlinear_step<T: Real>(
    state: &CoupledState<T>,
    t: T,
    nonlinearity: Nonlinearity,
) -> CoupledState<T> {
    let mut out = state.clone();
    let (mut psi, mut phi) = out.raw_mut();
    coupled_phase_rotate(&mut psi, &mut phi, t, nonlinearity.strength());
    CoupledState::from_raw(*state.grid(), psi, phi)
}

fn coupled_phase_rotate<T: Real>(psi: &mut [Cx<T>], phi: &mut [Cx<T>], t: T, strength: T) {
    if strength == T::zero() {
        return;
    }
    let c = -T::lit(2.0) * strength * t;
    let two = T::lit(2.0);
    for (a, b) in psi.iter_mut().zip(phi.iter_mut()) {
        let (pa, pb) = (a.norm_sqr(), b.norm_sqr());
        *a = *a * cis(c * (pa + two * pb));
        *b = *b * cis(c * (pb + two * pa));
    }
}

/// One Strang step `N(dt/2) L(dt) N(dt/2)` of the coupled system.
pub fn nls_strang_step<T: Real>(
    state: &CoupledState<T>,
    dt: T,
    nonlinearity: Nonlinearity,
) -> CoupledState<T> {
    let mut stepper = CoupledStepper::new(*state.grid(), nonlinearity);
    let mut out = state.clone();
    let (mut psi, mut phi) = out.raw_mut();
    stepper.step(&mut psi, &mut phi, dt);
    CoupledState::from_raw(*state.grid(), psi, phi)
}

#[derive(Debug)]
pub struct CoupledStepper<T: Real> {
    grid: TorusGrid<T>,
    nonlinearity: Nonlinearity,
    plan: FourierPlan<T>,
    xi_sqr: Vec<T>,
    cached: Option<(T, Vec<Cx<T>>)>,
}

impl<T: Real> CoupledStepper<T> {
    pub fn new(grid: TorusGrid<T>, nonlinearity: Nonlinearity) -> Self {
        let xi_sqr = (0..grid.m()).map(|j| grid.wavenumber(j).powi(2)).collect();
        Self {
            grid,
            nonlinearity,
            plan: FourierPlan::new(grid.m()),
            xi_sqr,
            cached: None,
        }
    }

    /// Applies the free flows; the cached multiplier is `e^{-i t xi^2}/m`
    /// and its conjugate drives `phi`.
    pub fn linear(&mut self, psi: &mut [Cx<T>], phi: &mut [Cx<T>], t: T) {
        if !matches!(&self.cached, Some((c, _)) if *c == t) {
            let inv_m = T::one() / T::from_count(self.grid.m());
            let mult = self.xi_sqr.iter().map(|&k2| cis(-t * k2) * inv_m).collect();
            self.cached = Some((t, mult));
        }
        let mult = &self.cached.as_ref().expect("multiplier cached").1;
        self.plan.forward(psi);
        for (z, w) in psi.iter_mut().zip(mult) {
            *z = *z * *w;
        }
        self.plan.inverse(psi);
        self.plan.forward(phi);
        for (z, w) in phi.iter_mut().zip(mult) {
            *z = *z * w.conj();
        }
        self.plan.inverse(phi);
    }

    pub fn step(&mut self, psi: &mut [Cx<T>], phi: &mut [Cx<T>], dt: T) {
        let half = dt / T::lit(2.0);
        let g = self.nonlinearity.strength();
        coupled_phase_rotate(psi, phi, half, g);
        self.linear(psi, phi, dt);
        coupled_phase_rotate(psi, phi, half, g);
    }
}

const BLOWUP_CHECK_STRIDE: usize = 128;

/// Streams the coupled solution through `observe` at each snapshot time.
/// Non-negative times are visited ascending, then negative times descending.
pub fn nls_evolve_with<T: Real>(
    state0: &CoupledState<T>,
    t_end: T,
    dt: T,
    nonlinearity: Nonlinearity,
    snapshot_ts: &[T],
    mut observe: impl FnMut(T, &CoupledState<T>) -> Result<()>,
) -> Result<()> {
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "time step must be positive, got {dt}"
        )));
    }
    for &t in snapshot_ts {
        if !t.is_finite() || t.abs() > t_end.abs() * (T::one() + T::lit(1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "snapshot time {t} outside [-{t_end}, {t_end}]"
            )));
        }
    }
    if !state0.all_finite() {
        return Err(Error::Blowup {
            time: 0.0,
            detail: "initial data not finite".into(),
        });
    }
    let mut forward: Vec<T> = snapshot_ts
        .iter()
        .copied()
        .filter(|t| *t >= T::zero())
        .collect();
    let mut backward: Vec<T> = snapshot_ts
        .iter()
        .copied()
        .filter(|t| *t < T::zero())
        .collect();
    forward.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    backward.sort_by(|a, b| b.partial_cmp(a).expect("finite"));

    let grid = *state0.grid();
    let mut stepper = CoupledStepper::new(grid, nonlinearity);
    for (targets, step) in [(forward, dt), (backward, -dt)] {
        if targets.is_empty() {
            continue;
        }
        let mut psi = state0.psi().values().to_vec();
        let mut phi = state0.phi().values().to_vec();
        let mut steps_done: u64 = 0;
        for target in targets {
            let n_full = ((target / step).to_f64_lossy() * (1.0 + 1e-14))
                .floor()
                .max(0.0) as u64;
            while steps_done < n_full {
                stepper.step(&mut psi, &mut phi, step);
                steps_done += 1;
                if steps_done.is_multiple_of(BLOWUP_CHECK_STRIDE as u64) {
                    check_finite(&psi, &phi, T::lit(steps_done as f64) * step)?;
                }
            }
            let rest = target - T::lit(steps_done as f64) * step;
            let (mut p, mut q) = (psi.clone(), phi.clone());
            if rest.abs() > T::epsilon() * T::lit(64.0) * target.abs().max(T::one()) {
                stepper.step(&mut p, &mut q, rest);
            }
            check_finite(&p, &q, target)?;
            observe(target, &CoupledState::from_raw(grid, p, q))?;
        }
    }
    Ok(())
}

fn check_finite<T: Real>(psi: &[Cx<T>], phi: &[Cx<T>], t: T) -> Result<()> {
    if psi.iter().chain(phi).all(is_finite) {
        Ok(())
    } else {
        Err(Error::Blowup {
            time: t.to_f64_lossy(),
            detail: "non-finite continuum value".into(),
        })
    }
}

/// Solution snapshots `(t, state)` sorted by time.
pub fn nls_evolve<T: Real>(
    state0: &CoupledState<T>,
    t_end: T,
    dt: T,
    nonlinearity: Nonlinearity,
    snapshot_ts: &[T],
) -> Result<Vec<(T, CoupledState<T>)>> {
    let mut out = Vec::with_capacity(snapshot_ts.len());
    nls_evolve_with(state0, t_end, dt, nonlinearity, snapshot_ts, |t, s| {
        out.push((t, s.clone()));
        Ok(())
    })?;
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    Ok(out)
}

/// `(int |psi|^2, int |phi|^2)`
pub fn coupled_mass<T: Real>(state: &CoupledState<T>) -> (T, T) {
    (state.psi.norm_sqr(), state.phi.norm_sqr())
}

/// `int |psi_x|^2 - |phi_x|^2 +- (|psi|^4 + |phi|^4 + 4|psi|^2|phi|^2) dx`
///
/// Indefinite in sign; useful as a conservation check, not as a norm.
pub fn coupled_energy<T: Real>(state: &CoupledState<T>, nonlinearity: Nonlinearity) -> T {
    let grid = *state.grid();
    let mut plan = FourierPlan::new(grid.m());
    let mut gradient_sqr = |f: &ContinuumField<T>| {
        let mut buf = f.values().to_vec();
        plan.forward(&mut buf);
        let s = buf.iter().enumerate().fold(T::zero(), |acc, (j, c)| {
            acc + grid.wavenumber(j).powi(2) * c.norm_sqr()
        });
        // (1/len) sum xi^2 |dx c|^2
        s * grid.spacing() * grid.spacing() / grid.length()
    };
    let kinetic = gradient_sqr(&state.psi) - gradient_sqr(&state.phi);
    let four = T::lit(4.0);
    let quartic =
        state
            .psi
            .values()
            .iter()
            .zip(state.phi.values())
            .fold(T::zero(), |acc, (a, b)| {
                let (pa, pb) = (a.norm_sqr(), b.norm_sqr());
                acc + pa * pa + pb * pb + four * pa * pb
            })
            * grid.spacing();
    kinetic + nonlinearity.strength::<T>() * quartic
}
