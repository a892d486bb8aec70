//! Lattice and continuum Fourier transforms, frequency projections, the
//! initial-data sampler, and the semicircle reconstruction operator.
//!
//! Conventions: a lattice field has Fourier series
//! `u_hat(theta) = sum_n u_n e^{-i n theta}` evaluated on the nodes
//! `theta_k = 2 pi k / m`, and `u_n = (1/m) sum_k u_hat(theta_k) e^{i n theta_k}`.
//! A continuum field `f` on a torus of length `len` has coefficients
//! `f_hat(xi_k) = int f(x) e^{-i x xi_k} dx` with `xi_k = 2 pi k / len`, and
//! `f(x) = (1/len) sum_k f_hat(xi_k) e^{i x xi_k}`. Lattice and continuum grids
//! of one experiment share `len`, so `theta_k / h` and `xi_k` coincide index
//! for index: that is the map `theta = h xi`.

use crate::error::{Error, Result};
use crate::field::{ContinuumField, LatticeField, SpectrumField};
use crate::fourier::FourierPlan;
use crate::grid::TorusGrid;
use crate::scalar::{cis, Cx, Real};

/// Default admissibility gate for the lattice spacing.
pub const DEFAULT_H0: f64 = 0.25;

pub fn dft<T: Real>(field: &LatticeField<T>) -> SpectrumField<T> {
    let mut buf = field.values().to_vec();
    FourierPlan::new(buf.len()).forward(&mut buf);
    SpectrumField::from_raw(*field.grid(), buf)
}

pub fn idft<T: Real>(spec: &SpectrumField<T>) -> LatticeField<T> {
    let mut buf = spec.coeffs().to_vec();
    FourierPlan::new(buf.len()).inverse(&mut buf);
    let inv_m = T::one() / T::from_count(buf.len());
    buf.iter_mut().for_each(|z| *z = *z * inv_m);
    LatticeField::from_raw(*spec.grid(), buf)
}

/// Continuum Fourier coefficients `f_hat(xi_k)` in FFT order.
pub fn continuum_spectrum<T: Real>(f: &ContinuumField<T>) -> Vec<Cx<T>> {
    let mut buf = f.values().to_vec();
    FourierPlan::new(buf.len()).forward(&mut buf);
    let dx = f.dx();
    buf.iter_mut().for_each(|z| *z = *z * dx);
    buf
}

/// Inverse of [`continuum_spectrum`].
pub fn continuum_from_spectrum<T: Real>(
    grid: TorusGrid<T>,
    mut coeffs: Vec<Cx<T>>,
    band: Option<T>,
) -> Result<ContinuumField<T>> {
    if coeffs.len() != grid.m() {
        return Err(Error::LengthMismatch {
            expected: grid.m(),
            actual: coeffs.len(),
        });
    }
    FourierPlan::new(grid.m()).inverse(&mut coeffs);
    let inv_len = T::one() / grid.length();
    coeffs.iter_mut().for_each(|z| *z = *z * inv_len);
    Ok(ContinuumField::from_raw(grid, coeffs, band))
}

/// Smooth Littlewood-Paley bump: 1 on `|r| <= 1`, 0 on `|r| >= 2`, raised
/// cosine `cos^2(pi (|r| - 1) / 2)` in between.
pub fn lowpass_profile<T: Real>(r: T) -> T {
    let r = r.abs();
    if r <= T::one() {
        T::one()
    } else if r >= T::lit(2.0) {
        T::zero()
    } else {
        let c = (T::FRAC_PI_2() * (r - T::one())).cos();
        c * c
    }
}

/// Applies the multiplier `lowpass_profile(xi / n_cut)`; the result is
/// band-limited to `|xi| < 2 n_cut`.
pub fn smooth_lowpass<T: Real>(f: &ContinuumField<T>, n_cut: T) -> Result<ContinuumField<T>> {
    if !(n_cut > T::zero() && n_cut.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "n_cut must be positive, got {n_cut}"
        )));
    }
    let grid = *f.grid();
    let mut coeffs = continuum_spectrum(f);
    for (j, c) in coeffs.iter_mut().enumerate() {
        *c = *c * lowpass_profile(grid.wavenumber(j) / n_cut);
    }
    let band = T::lit(2.0) * n_cut;
    let band = f.band().map_or(band, |b| b.min(band));
    continuum_from_spectrum(grid, coeffs, Some(band))
}

/// Threshold `lambda` of the sharp cutoff onto `{theta : |sin theta| < lambda}`.
///
/// `lambda >= 1` makes the cutoff the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec<T> {
    lambda: T,
}

impl<T: Real> CutoffSpec<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || lambda.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "cutoff lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn is_identity(&self) -> bool {
        self.lambda >= T::one()
    }

    /// Whether `theta` lies in the retained set (strict inequality).
    #[inline]
    pub fn contains(&self, theta: T) -> bool {
        self.is_identity() || theta.sin().abs() < self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    Inside,
    Outside,
}

pub fn sharp_cutoff<T: Real>(
    spec: &SpectrumField<T>,
    cutoff: CutoffSpec<T>,
    keep: Keep,
) -> SpectrumField<T> {
    let grid = *spec.grid();
    let zero = Cx::new(T::zero(), T::zero());
    let coeffs = spec
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let inside = cutoff.contains(grid.theta(j));
            if inside == (keep == Keep::Inside) {
                c
            } else {
                zero
            }
        })
        .collect();
    SpectrumField::from_raw(grid, coeffs)
}

/// Lattice spacing `h`, sampling exponent `gamma`, and the smoothing scale
/// `n_cut = h^{gamma - 1} / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingSpec<T> {
    h: T,
    gamma: T,
    n_cut: T,
}

impl<T: Real> SamplingSpec<T> {
    pub fn new(h: T, gamma: T) -> Result<Self> {
        Self::with_gate(h, gamma, T::lit(DEFAULT_H0))
    }

    /// Requires `0 < h < h0` (strict: `h >= h0` is refused), `0 < gamma < 1`,
    /// and `h^gamma < pi/2` so that the sampled spectrum avoids `theta = +-pi/2`.
    pub fn with_gate(h: T, gamma: T, h0: T) -> Result<Self> {
        if !(h > T::zero() && h < h0) {
            return Err(Error::InvalidParameter(format!(
                "lattice spacing {h} outside (0, {h0})"
            )));
        }
        if !(gamma > T::zero() && gamma < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "gamma {gamma} outside (0, 1)"
            )));
        }
        if h.powf(gamma) >= T::FRAC_PI_2() {
            return Err(Error::InvalidParameter(format!(
                "h^gamma = {} must stay below pi/2",
                h.powf(gamma)
            )));
        }
        let n_cut = h.powf(gamma - T::one()) / T::lit(2.0);
        Ok(Self { h, gamma, n_cut })
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn n_cut(&self) -> T {
        self.n_cut
    }
}

/// Values of the band-limited interpolant of `f` at the nodes of `target`
/// (same torus length). Exact for trigonometric polynomials: a coarser
/// target subsamples, a finer one zero-pads in frequency.
pub fn evaluate_on<T: Real>(f: &ContinuumField<T>, target: &TorusGrid<T>) -> Result<Vec<Cx<T>>> {
    let source = f.grid();
    if !source.same_length(target) {
        return Err(Error::GridMismatch(format!(
            "torus lengths differ: {} vs {}",
            source.length(),
            target.length()
        )));
    }
    if let Some(r) = source.refinement_over(target) {
        return Ok(f.values().iter().step_by(r).copied().collect());
    }
    let mut coeffs = f.values().to_vec();
    FourierPlan::new(source.m()).forward(&mut coeffs);
    let mut padded = vec![Cx::new(T::zero(), T::zero()); target.m()];
    let half = source.m() / 2;
    for (j, c) in coeffs.into_iter().enumerate() {
        let k = source.signed_index(j);
        if j == half {
            // Nyquist bin of the source: split between +-m/2 to keep real data real.
            let half_c = c * T::lit(0.5);
            padded[target.slot(k)] = padded[target.slot(k)] + half_c;
            padded[target.slot(-k)] = padded[target.slot(-k)] + half_c;
        } else {
            padded[target.slot(k)] = c;
        }
    }
    FourierPlan::new(target.m()).inverse(&mut padded);
    let inv = T::one() / T::from_count(source.m());
    padded.iter_mut().for_each(|z| *z = *z * inv);
    Ok(padded)
}

/// Builds `u_n(0) = h [P psi0](h n) + (-1)^n h [P phi0](h n)` with `P` the
/// smooth low-pass at `spec.n_cut()`.
pub fn sample_initial_data<T: Real>(
    psi0: &ContinuumField<T>,
    phi0: &ContinuumField<T>,
    spec: &SamplingSpec<T>,
) -> Result<LatticeField<T>> {
    if psi0.grid() != phi0.grid() {
        return Err(Error::GridMismatch(
            "psi0 and phi0 on different grids".into(),
        ));
    }
    let fine = psi0.grid();
    let top = T::lit(2.0) * spec.n_cut();
    if top >= fine.nyquist() {
        return Err(Error::Aliasing(format!(
            "fine grid (Nyquist {}) cannot resolve the smoothing band {}",
            fine.nyquist(),
            top
        )));
    }
    let lattice = TorusGrid::with_spacing(fine.length(), spec.h())?;
    let psi = evaluate_on(&smooth_lowpass(psi0, spec.n_cut())?, &lattice)?;
    let phi = evaluate_on(&smooth_lowpass(phi0, spec.n_cut())?, &lattice)?;
    let h = spec.h();
    let values = psi
        .into_iter()
        .zip(phi)
        .enumerate()
        .map(|(j, (a, b))| {
            let b = if lattice.signed_index(j) % 2 == 0 {
                b
            } else {
                -b
            };
            (a + b) * h
        })
        .collect();
    LatticeField::new(lattice, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// `psi^h`: the half-open semicircle `-pi/2 <= theta < pi/2`.
    Low,
    /// `phi^h`: the complementary semicircle `pi/2 <= theta < 3pi/2`, recentred
    /// and rotated by `e^{4 i tau}`.
    ///
    /// Together the two halves partition the lattice frequencies, so the node
    /// `theta = -pi/2` belongs to `psi^h` and `theta = pi/2` to `phi^h`.
    High,
}

/// Semicircle reconstruction with cached plans, for repeated use on one
/// lattice/output grid pair.
#[derive(Debug)]
pub struct Reconstructor<T: Real> {
    lattice: TorusGrid<T>,
    output: TorusGrid<T>,
    lattice_plan: FourierPlan<T>,
    output_plan: FourierPlan<T>,
    spectrum: Vec<Cx<T>>,
}

impl<T: Real> Reconstructor<T> {
    pub fn new(lattice: TorusGrid<T>, output: TorusGrid<T>) -> Result<Self> {
        if !lattice.same_length(&output) {
            return Err(Error::GridMismatch(format!(
                "lattice length {} differs from output length {}",
                lattice.length(),
                output.length()
            )));
        }
        if output.m() < lattice.m() / 2 {
            return Err(Error::Aliasing(format!(
                "output grid with {} nodes cannot hold the semicircle of a {}-site lattice",
                output.m(),
                lattice.m()
            )));
        }
        Ok(Self {
            lattice,
            output,
            lattice_plan: FourierPlan::new(lattice.m()),
            output_plan: FourierPlan::new(output.m()),
            spectrum: vec![Cx::new(T::zero(), T::zero()); lattice.m()],
        })
    }

    pub fn output_grid(&self) -> &TorusGrid<T> {
        &self.output
    }

    fn load(&mut self, u: &LatticeField<T>) -> Result<()> {
        if u.grid() != &self.lattice {
            return Err(Error::GridMismatch(
                "field not on the reconstructor's lattice".into(),
            ));
        }
        self.spectrum.copy_from_slice(u.values());
        self.lattice_plan.forward(&mut self.spectrum);
        Ok(())
    }

    fn emit(&mut self, component: Component, tau: T) -> ContinuumField<T> {
        let m = self.lattice.m();
        let quarter = (m / 4) as i64;
        let phase = match component {
            Component::Low => Cx::new(T::one(), T::zero()),
            Component::High => cis(T::lit(4.0) * tau),
        };
        let inv_len = T::one() / self.lattice.length();
        let mut out = vec![Cx::new(T::zero(), T::zero()); self.output.m()];
        // -pi/2 <= theta_k < pi/2  <=>  -m/4 <= k < m/4
        for k in (-quarter)..quarter {
            let src = match component {
                Component::Low => self.lattice.slot(k),
                Component::High => self.lattice.slot(k + (m / 2) as i64),
            };
            out[self.output.slot(k)] = self.spectrum[src] * phase;
        }
        self.output_plan.inverse(&mut out);
        out.iter_mut().for_each(|z| *z = *z * inv_len);
        let band = T::FRAC_PI_2() / self.lattice.spacing();
        ContinuumField::from_raw(self.output, out, Some(band))
    }

    pub fn component(
        &mut self,
        u: &LatticeField<T>,
        tau: T,
        component: Component,
    ) -> Result<ContinuumField<T>> {
        self.load(u)?;
        Ok(self.emit(component, tau))
    }

    /// `(psi^h, phi^h)` from one transform of `u`.
    pub fn pair(
        &mut self,
        u: &LatticeField<T>,
        tau: T,
    ) -> Result<(ContinuumField<T>, ContinuumField<T>)> {
        self.load(u)?;
        let low = self.emit(Component::Low, tau);
        let high = self.emit(Component::High, tau);
        Ok((low, high))
    }
}

pub fn reconstruct<T: Real>(
    u: &LatticeField<T>,
    tau: T,
    component: Component,
    output: &TorusGrid<T>,
) -> Result<ContinuumField<T>> {
    Reconstructor::new(*u.grid(), *output)?.component(u, tau, component)
}

/// Reverses the reconstruction on the lattice:
/// `u_n = h psi^h(h n) + e^{-4 i tau} (-1)^n h phi^h(h n)`.
pub fn lattice_from_components<T: Real>(
    psi_h: &ContinuumField<T>,
    phi_h: &ContinuumField<T>,
    tau: T,
    lattice: &TorusGrid<T>,
) -> Result<LatticeField<T>> {
    let low = evaluate_on(psi_h, lattice)?;
    let high = evaluate_on(phi_h, lattice)?;
    let h = lattice.spacing();
    let rot = cis(-T::lit(4.0) * tau);
    let values = low
        .into_iter()
        .zip(high)
        .enumerate()
        .map(|(j, (a, b))| {
            let b = b * rot;
            let b = if lattice.signed_index(j) % 2 == 0 {
                b
            } else {
                -b
            };
            (a + b) * h
        })
        .collect();
    LatticeField::new(*lattice, values)
}
