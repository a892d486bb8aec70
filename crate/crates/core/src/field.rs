//! Value types for lattice states, their spectra, and continuum profiles.

use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::scalar::{is_finite, Cx, Real};

fn check_values<T: Real>(grid: &TorusGrid<T>, values: &[Cx<T>]) -> Result<()> {
    if values.len() != grid.m() {
        return Err(Error::LengthMismatch {
            expected: grid.m(),
            actual: values.len(),
        });
    }
    if let Some(i) = values.iter().position(|z| !is_finite(z)) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

/// Complex state `u_n` on a periodic lattice of spacing `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeField<T> {
    grid: TorusGrid<T>,
    values: Vec<Cx<T>>,
}

impl<T: Real> LatticeField<T> {
    pub fn new(grid: TorusGrid<T>, values: Vec<Cx<T>>) -> Result<Self> {
        check_values(&grid, &values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TorusGrid<T>) -> Self {
        Self {
            grid,
            values: vec![Cx::new(T::zero(), T::zero()); grid.m()],
        }
    }

    /// Builds a field from `f(n)` where `n` is the signed site index.
    pub fn from_fn(grid: TorusGrid<T>, mut f: impl FnMut(i64) -> Cx<T>) -> Result<Self> {
        let values = (0..grid.m()).map(|j| f(grid.signed_index(j))).collect();
        Self::new(grid, values)
    }

    pub(crate) fn from_raw(grid: TorusGrid<T>, values: Vec<Cx<T>>) -> Self {
        debug_assert_eq!(values.len(), grid.m());
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    #[inline]
    pub fn h(&self) -> T {
        self.grid.spacing()
    }

    #[inline]
    pub fn values(&self) -> &[Cx<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Cx<T>> {
        self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Cx<T>] {
        &mut self.values
    }

    pub fn scaled(&self, c: Cx<T>) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&z| z * c).collect())
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(is_finite)
    }

    /// `sum_n |u_n - v_n|^2`
    pub fn distance_sqr(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (a, b)| acc + (*a - *b).norm_sqr())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }
}

/// Fourier-series coefficients `u_hat(theta_k)` of a lattice field, FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField<T> {
    grid: TorusGrid<T>,
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> SpectrumField<T> {
    pub fn new(grid: TorusGrid<T>, coeffs: Vec<Cx<T>>) -> Result<Self> {
        check_values(&grid, &coeffs)?;
        Ok(Self { grid, coeffs })
    }

    pub(crate) fn from_raw(grid: TorusGrid<T>, coeffs: Vec<Cx<T>>) -> Self {
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Cx<T>> {
        self.coeffs
    }

    /// `(1/m) sum_k |c_k|^2`, the spectral side of Plancherel.
    pub fn mass(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
            / T::from_count(self.grid.m())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("spectra on different grids".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_raw(self.grid, coeffs))
    }
}

/// Samples of a band-limited function on a fine periodic grid of spacing `dx`.
///
/// `band`, when set, is the declared bandwidth: Fourier coefficients with
/// `|xi| >= band` are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumField<T> {
    grid: TorusGrid<T>,
    values: Vec<Cx<T>>,
    band: Option<T>,
}

impl<T: Real> ContinuumField<T> {
    pub fn new(grid: TorusGrid<T>, values: Vec<Cx<T>>) -> Result<Self> {
        check_values(&grid, &values)?;
        Ok(Self {
            grid,
            values,
            band: None,
        })
    }

    pub fn zeros(grid: TorusGrid<T>) -> Self {
        Self {
            grid,
            values: vec![Cx::new(T::zero(), T::zero()); grid.m()],
            band: None,
        }
    }

    /// Samples `f(x)` at the centred torus coordinates.
    pub fn from_fn(grid: TorusGrid<T>, mut f: impl FnMut(T) -> Cx<T>) -> Result<Self> {
        let values = (0..grid.m()).map(|j| f(grid.position(j))).collect();
        Self::new(grid, values)
    }

    pub(crate) fn from_raw(grid: TorusGrid<T>, values: Vec<Cx<T>>, band: Option<T>) -> Self {
        Self { grid, values, band }
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn dx(&self) -> T {
        self.grid.spacing()
    }

    pub fn values(&self) -> &[Cx<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Cx<T>> {
        self.values
    }

    pub fn band(&self) -> Option<T> {
        self.band
    }

    pub fn with_band(mut self, band: Option<T>) -> Self {
        self.band = band;
        self
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(is_finite)
    }

    /// `int |f|^2 dx`, exact for trigonometric polynomials below Nyquist.
    pub fn norm_sqr(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            * self.dx()
    }

    pub fn l2_distance(&self, other: &Self) -> Result<T> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "continuum fields on different grids".into(),
            ));
        }
        let s = self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (a, b)| acc + (*a - *b).norm_sqr());
        Ok((s * self.dx()).sqrt())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }
}
