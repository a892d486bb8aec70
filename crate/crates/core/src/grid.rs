use crate::error::{Error, Result};
use crate::scalar::{is_power_of_two, Real};

/// Uniform periodic grid of `m` sites with spacing `spacing`.
///
/// Site `j` sits at the signed coordinate `signed_index(j) * spacing`, so the
/// torus is centred at the origin. Frequency node `j` is
/// `theta_j = 2 pi signed_index(j) / m`, the FFT ordering used throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid<T> {
    m: usize,
    spacing: T,
}

impl<T: Real> TorusGrid<T> {
    pub fn new(m: usize, spacing: T) -> Result<Self> {
        if !is_power_of_two(m) || m < 2 {
            return Err(Error::NotPowerOfTwo(m));
        }
        if !(spacing.is_finite() && spacing > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        Ok(Self { m, spacing })
    }

    /// Grid with `m` sites covering a torus of the given length.
    pub fn from_length(length: T, m: usize) -> Result<Self> {
        if !(length.is_finite() && length > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive, got {length}"
            )));
        }
        Self::new(m, length / T::from_count(m))
    }

    /// Lattice of spacing `h` on a torus of the given length; `length / h`
    /// must be a power of two.
    pub fn with_spacing(length: T, h: T) -> Result<Self> {
        if !(h.is_finite() && h > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got {h}"
            )));
        }
        let ratio = (length / h).to_f64_lossy();
        let m = ratio.round();
        if !(m >= 2.0) || (ratio - m).abs() > 1e-9 * m {
            return Err(Error::InvalidGrid(format!(
                "length {length} is not an integer multiple of spacing {h}"
            )));
        }
        Self::from_length(length, m as usize)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn spacing(&self) -> T {
        self.spacing
    }

    #[inline]
    pub fn length(&self) -> T {
        self.spacing * T::from_count(self.m)
    }

    #[inline]
    pub fn signed_index(&self, j: usize) -> i64 {
        if j < self.m / 2 {
            j as i64
        } else {
            j as i64 - self.m as i64
        }
    }

    /// Storage slot of a signed index, wrapped mod `m`.
    #[inline]
    pub fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.m as i64) as usize
    }

    /// Discrete frequency `theta_j` in `[-pi, pi)`.
    #[inline]
    pub fn theta(&self, j: usize) -> T {
        T::TAU() * T::lit(self.signed_index(j) as f64) / T::from_count(self.m)
    }

    /// Physical wavenumber `xi_j = theta_j / spacing = 2 pi k / length`.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> T {
        self.theta(j) / self.spacing
    }

    #[inline]
    pub fn position(&self, j: usize) -> T {
        T::lit(self.signed_index(j) as f64) * self.spacing
    }

    /// Largest resolvable wavenumber `pi / spacing`.
    pub fn nyquist(&self) -> T {
        T::PI() / self.spacing
    }

    pub fn same_length(&self, other: &Self) -> bool {
        let (a, b) = (self.length(), other.length());
        (a - b).abs() <= T::lit(1e-12) * a.max(b) + T::epsilon() * T::lit(8.0) * a.max(b)
    }

    /// Integer ratio `self.m / coarse.m` when `coarse` subsamples `self`.
    pub fn refinement_over(&self, coarse: &Self) -> Option<usize> {
        if !self.same_length(coarse) || self.m < coarse.m {
            return None;
        }
        Some(self.m / coarse.m)
    }
}
