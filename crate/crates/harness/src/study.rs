//! The h-sweep comparing reconstructed lattice solutions with the coupled
//! continuum system.

use std::time::Instant;

use dnls_core::continuum::nls_evolve;
use dnls_core::lattice::evolve;
use dnls_core::spectral::{
    lattice_from_components, sample_initial_data, smooth_lowpass, Reconstructor,
};
use dnls_core::{
    ContinuumField64, CoupledState64, DnlsParams64, LatticeField64, SamplingSpec, TorusGrid64,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Lattice initial state and the matching smoothed continuum data for one `h`.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub h: f64,
    pub lattice: TorusGrid64,
    pub fine: TorusGrid64,
    pub sampling: SamplingSpec<f64>,
    pub u0: LatticeField64,
    /// `(P psi_0, P phi_0)` on the reference grid.
    pub state0: CoupledState64,
}

pub fn prepare(cfg: &ExperimentConfig, h: f64) -> Result<PreparedData> {
    let fine = cfg.reference_grid()?;
    let lattice = cfg.lattice_grid(h)?;
    let sampling = SamplingSpec::with_gate(h, cfg.gamma, cfg.h0)?;
    let psi_raw = cfg.psi.sample(&fine)?;
    let phi_raw = cfg.phi.sample(&fine)?;
    let u0 = sample_initial_data(&psi_raw, &phi_raw, &sampling)?;
    debug_assert_eq!(u0.grid(), &lattice);
    let psi0 = smooth_lowpass(&psi_raw, sampling.n_cut())?;
    let phi0 = smooth_lowpass(&phi_raw, sampling.n_cut())?;
    Ok(PreparedData {
        h,
        lattice,
        fine,
        sampling,
        u0,
        state0: CoupledState64::new(psi0, phi0)?,
    })
}

/// One report line. Column order is part of the output format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub h: f64,
    /// `sup_j ||psi^h(t_j) - psi(t_j)||_{L^2}`
    pub err_psi: f64,
    pub err_phi: f64,
    /// `sup_j h^{-1/2} ||u_n - h psi(hn) - e^{-4i tau} (-1)^n h phi(hn)||_{l^2}`
    pub longwave_err: f64,
    /// Estimated reference error over measured error, worst component.
    pub ref_check: f64,
    pub seconds: f64,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub schema_version: u32,
    pub rows: Vec<ConvergenceRow>,
}

/// Quantities kept next to each row but not written to the report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowDetail {
    pub h: f64,
    /// `sup_j sqrt(err_psi(t_j)^2 + err_phi(t_j)^2)`
    pub joint_err: f64,
    /// `max_j |joint(t_j) - longwave(t_j)|`
    pub identity_gap: f64,
    pub ref_err_psi: f64,
    pub ref_err_phi: f64,
    pub lattice_mass_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub report: ConvergenceReport,
    pub details: Vec<RowDetail>,
}

fn numerical<E: Into<HarnessError>>(h: f64) -> impl Fn(E) -> HarnessError {
    move |e| match e.into() {
        HarnessError::Numerical(msg) => HarnessError::Numerical(format!("h = {h}: {msg}")),
        other => other,
    }
}

fn ratio(est: f64, err: f64) -> f64 {
    if est == 0.0 {
        0.0
    } else {
        est / err
    }
}

/// Reference snapshots `(t, state)` and per-snapshot error estimates.
pub type ReferenceRun = (Vec<(f64, CoupledState64)>, Vec<(f64, f64)>);

/// Continuum reference at `ref_dt / 2` and its Richardson error estimate
/// `|| x_{dt} - x_{dt/2} || / 3` per snapshot.
pub fn reference_solution(
    cfg: &ExperimentConfig,
    state0: &CoupledState64,
    times: &[f64],
) -> Result<ReferenceRun> {
    let nl = cfg.nonlinearity();
    let coarse = nls_evolve(state0, cfg.t_end, cfg.ref_dt, nl, times)?;
    let fine = nls_evolve(state0, cfg.t_end, cfg.ref_dt / 2.0, nl, times)?;
    let estimates = coarse
        .iter()
        .zip(&fine)
        .map(|((_, a), (_, b))| {
            let ep = a.psi().l2_distance(b.psi())? / 3.0;
            let eq = a.phi().l2_distance(b.phi())? / 3.0;
            Ok((ep, eq))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((fine, estimates))
}

/// Long-wave error at one snapshot.
pub fn longwave_error(
    u: &LatticeField64,
    psi: &ContinuumField64,
    phi: &ContinuumField64,
    tau: f64,
) -> Result<f64> {
    let v = lattice_from_components(psi, phi, tau, u.grid())?;
    Ok((u.distance_sqr(&v) / u.h()).sqrt())
}

pub fn run_h(cfg: &ExperimentConfig, h: f64) -> Result<(ConvergenceRow, RowDetail)> {
    let clock = Instant::now();
    let prep = prepare(cfg, h)?;
    let times = cfg.snapshot_times();
    let taus: Vec<f64> = times.iter().map(|t| t / (h * h)).collect();
    let params = DnlsParams64::new(cfg.nonlinearity(), cfg.dt, cfg.t_end / (h * h))?;
    let series = evolve(&prep.u0, &params, &taus).map_err(numerical(h))?;
    let (reference, estimates) =
        reference_solution(cfg, &prep.state0, &times).map_err(numerical(h))?;
    let mut recon = Reconstructor::new(prep.lattice, prep.fine)?;

    let mut row = ConvergenceRow {
        h,
        err_psi: 0.0,
        err_phi: 0.0,
        longwave_err: 0.0,
        ref_check: 0.0,
        seconds: 0.0,
    };
    let mut detail = RowDetail {
        h,
        joint_err: 0.0,
        identity_gap: 0.0,
        ref_err_psi: 0.0,
        ref_err_phi: 0.0,
        lattice_mass_drift: series.max_relative_mass_drift(),
    };
    for (((tau, u), (t, exact)), (est_psi, est_phi)) in series
        .taus
        .iter()
        .zip(&series.states)
        .zip(&reference)
        .zip(&estimates)
    {
        debug_assert!((tau * h * h - t).abs() <= 1e-12 * t.abs().max(1.0));
        let (psi_h, phi_h) = recon.pair(u, *tau)?;
        let e_psi = psi_h.l2_distance(exact.psi())?;
        let e_phi = phi_h.l2_distance(exact.phi())?;
        let joint = e_psi.hypot(e_phi);
        let lw = longwave_error(u, exact.psi(), exact.phi(), *tau)?;
        for v in [e_psi, e_phi, lw] {
            if !v.is_finite() {
                return Err(HarnessError::Numerical(format!(
                    "h = {h}: non-finite error at t = {t}"
                )));
            }
        }
        row.err_psi = row.err_psi.max(e_psi);
        row.err_phi = row.err_phi.max(e_phi);
        row.longwave_err = row.longwave_err.max(lw);
        detail.joint_err = detail.joint_err.max(joint);
        detail.identity_gap = detail.identity_gap.max((joint - lw).abs());
        detail.ref_err_psi = detail.ref_err_psi.max(*est_psi);
        detail.ref_err_phi = detail.ref_err_phi.max(*est_phi);
    }
    row.ref_check =
        ratio(detail.ref_err_psi, row.err_psi).max(ratio(detail.ref_err_phi, row.err_phi));
    if row.ref_check > cfg.ref_tolerance {
        return Err(HarnessError::Numerical(format!(
            "h = {h}: reference under-resolved (estimated error / measured error = {:.3e} > {}); lower ref_dt",
            row.ref_check, cfg.ref_tolerance
        )));
    }
    if cfg.record_wall_time {
        row.seconds = clock.elapsed().as_secs_f64();
    }
    Ok((row, detail))
}

/// Runs every `h` of the config on up to `jobs` threads. Rows come back in
/// `h_list` order whatever the scheduling.
pub fn run_convergence_study(cfg: &ExperimentConfig, jobs: usize) -> Result<ConvergenceStudy> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<(ConvergenceRow, RowDetail)>> =
        pool.install(|| cfg.h_list.par_iter().map(|&h| run_h(cfg, h)).collect());
    let mut rows = Vec::with_capacity(results.len());
    let mut details = Vec::with_capacity(results.len());
    for r in results {
        let (row, detail) = r?;
        rows.push(row);
        details.push(detail);
    }
    Ok(ConvergenceStudy {
        report: ConvergenceReport {
            schema_version: REPORT_SCHEMA_VERSION,
            rows,
        },
        details,
    })
}
