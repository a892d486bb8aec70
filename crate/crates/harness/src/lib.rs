//! Configuration, experiment drivers, run persistence and reports for the
//! lattice/continuum NLS study. The `dnls` binary wraps these entry points.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod profiles;
pub mod report;
pub mod run;
pub mod study;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use report::{emit_report, Format};
pub use run::run_single;
pub use study::{run_convergence_study, ConvergenceReport, ConvergenceRow};
