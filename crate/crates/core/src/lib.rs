//! Discrete cubic NLS lattice, the lattice/continuum sampling and
//! reconstruction maps, the coupled cubic NLS limit system, and the
//! diagnostics used to compare them.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`, which is what the
//! experiment harness uses.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuum;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod lattice;
pub mod scalar;
pub mod spectral;

pub use continuum::CoupledState;
pub use diagnostics::{DriftCurve, NormSpec};
pub use error::{Error, Result};
pub use field::{ContinuumField, LatticeField, SpectrumField};
pub use grid::TorusGrid;
pub use lattice::{DnlsParams, Nonlinearity, SnapshotSeries};
pub use scalar::{cis, Cx, Real};
pub use spectral::{Component, CutoffSpec, Keep, SamplingSpec};

pub type TorusGrid64 = TorusGrid<f64>;
pub type LatticeField64 = LatticeField<f64>;
pub type SpectrumField64 = SpectrumField<f64>;
pub type ContinuumField64 = ContinuumField<f64>;
pub type SnapshotSeries64 = SnapshotSeries<f64>;
pub type DnlsParams64 = DnlsParams<f64>;
pub type CoupledState64 = CoupledState<f64>;
pub type DriftCurve64 = DriftCurve<f64>;
pub type NormSpec64 = NormSpec<f64>;
