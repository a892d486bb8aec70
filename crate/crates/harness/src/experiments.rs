//! Diagnostic runs on a single lattice evolution, and the sweeps built on
//! them.

use dnls_core::continuum::CoupledState;
use dnls_core::diagnostics::nonres::{max_tau_spacing, LatticeNonresonance};
use dnls_core::diagnostics::{
    bilinear_sweep, spatial_tail, AclAccumulator, BilinearOptions, BilinearSweep, DriftCurve,
    NonresonanceValues, StrichartzAccumulator, StrichartzReport,
};
use dnls_core::lattice::{energy, evolve_with, mass};
use dnls_core::spectral::Reconstructor;
use dnls_core::{ContinuumField64, DnlsParams64, LatticeField64};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::study::{prepare, PreparedData};

/// Lattice functionals at one shared comparison time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub t: f64,
    pub tau: f64,
    pub mass: f64,
    pub energy: f64,
    /// `||P_{|xi| >= kappa} (psi^h, phi^h)||^2` at `kappa = n_cut`.
    pub frequency_tail: f64,
    /// Reconstructed mass outside `|x| < L/4`.
    pub spatial_tail: f64,
}

#[derive(Debug, Clone)]
pub struct DiagnosticRun {
    pub prepared: PreparedData,
    /// Uniform snapshot spacing in `tau` used by every time integral.
    pub tau_spacing: f64,
    pub snapshots: Vec<SnapshotRecord>,
    /// Lattice states at the shared times, ascending.
    pub states: Vec<(f64, LatticeField64)>,
    /// `(psi^h, phi^h)` at `t = T`.
    pub final_components: (ContinuumField64, ContinuumField64),
    pub strichartz: StrichartzReport<f64>,
    pub acl: DriftCurve<f64>,
    pub nonresonance: NonresonanceValues<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Diagnostic,
    Shared(usize),
    Both(usize),
}

/// Spacing `tau_end / n` with `n` the smallest count resolving the `8 tau`
/// phase at 20 samples per period.
pub fn diagnostic_spacing(tau_end: f64) -> (f64, usize) {
    let n = (tau_end / max_tau_spacing::<f64>()).ceil().max(1.0) as usize;
    (tau_end / n as f64, n)
}

/// One evolution over `[-T/h^2, T/h^2]` from the configured data, feeding
/// every streaming diagnostic.
pub fn diagnostic_run(cfg: &ExperimentConfig, h: f64) -> Result<DiagnosticRun> {
    let prepared = prepare(cfg, h)?;
    let tau_end = cfg.t_end / (h * h);
    let (spacing, n) = diagnostic_spacing(tau_end);
    let mut schedule: Vec<(f64, Role)> = (0..=2 * n)
        .map(|j| ((j as f64 - n as f64) * spacing, Role::Diagnostic))
        .collect();
    for (i, t) in cfg.snapshot_times().iter().enumerate() {
        let tau = t / (h * h);
        match schedule
            .iter_mut()
            .find(|(s, _)| (s - tau).abs() <= 1e-9 * tau_end)
        {
            Some(slot) => *slot = (slot.0, Role::Both(i)),
            None => schedule.push((tau, Role::Shared(i))),
        }
    }
    schedule.sort_by(|a, b| a.0.total_cmp(&b.0));
    let taus: Vec<f64> = schedule.iter().map(|s| s.0).collect();

    let nl = cfg.nonlinearity();
    let params = DnlsParams64::new(nl, cfg.dt, tau_end * (1.0 + 1e-12))?;
    let mut strichartz = StrichartzAccumulator::new();
    let mut acl = AclAccumulator::new(&prepared.u0, h, &cfg.acl.kappas)?;
    let mut nonres = LatticeNonresonance::new(prepared.lattice)?;
    let mut recon = Reconstructor::new(prepared.lattice, prepared.fine)?;
    let n_shared = cfg.snapshot_count;
    let mut snapshots: Vec<Option<SnapshotRecord>> = vec![None; n_shared];
    let mut states: Vec<Option<(f64, LatticeField64)>> = vec![None; n_shared];
    let mut final_components = None;
    let kappa = prepared.sampling.n_cut();
    let radius = cfg.torus_length / 4.0;

    // the forward pass visits tau >= 0 ascending, as the time integral needs
    evolve_with(&prepared.u0, &params, &taus, |tau, u| {
        let idx = taus.partition_point(|s| *s < tau);
        let role = schedule[idx].1;
        if matches!(role, Role::Diagnostic | Role::Both(_)) {
            strichartz.push(tau, u);
            acl.push(u);
            if tau >= 0.0 {
                nonres.push(tau, u)?;
            }
        }
        if let Role::Shared(i) | Role::Both(i) = role {
            let (psi_h, phi_h) = recon.pair(u, tau)?;
            let state = CoupledState::new(psi_h, phi_h)?;
            snapshots[i] = Some(SnapshotRecord {
                t: tau * h * h,
                tau,
                mass: mass(u),
                energy: energy(u, nl),
                frequency_tail: dnls_core::diagnostics::frequency_tail(&state, kappa),
                spatial_tail: spatial_tail(&state, radius)?,
            });
            states[i] = Some((tau, u.clone()));
            if i == n_shared - 1 {
                final_components = Some(state.into_parts());
            }
        }
        Ok(())
    })
    .map_err(|e| match HarnessError::from(e) {
        HarnessError::Numerical(msg) => HarnessError::Numerical(format!("h = {h}: {msg}")),
        other => other,
    })?;

    Ok(DiagnosticRun {
        tau_spacing: spacing,
        snapshots: snapshots
            .into_iter()
            .map(|s| s.expect("every shared time visited"))
            .collect(),
        states: states
            .into_iter()
            .map(|s| s.expect("every shared time visited"))
            .collect(),
        final_components: final_components.expect("final time visited"),
        strichartz: strichartz.finish(h, cfg.t_end)?,
        acl: acl.finish(),
        nonresonance: nonres.finish()?,
        prepared,
    })
}

/// Strichartz ratios and non-resonance values for one `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: f64,
    pub l6_ratio: f64,
    pub l4_linf_ratio: f64,
    pub psi_mixed: f64,
    pub phi_mixed: f64,
    pub psi_control: f64,
    pub phi_control: f64,
}

impl SweepRow {
    pub fn from_run(h: f64, run: &DiagnosticRun) -> Self {
        Self {
            h,
            l6_ratio: run.strichartz.l6_ratio,
            l4_linf_ratio: run.strichartz.l4_linf_ratio,
            psi_mixed: run.nonresonance.psi_mixed,
            phi_mixed: run.nonresonance.phi_mixed,
            psi_control: run.nonresonance.psi_control,
            phi_control: run.nonresonance.phi_control,
        }
    }
}

pub fn diagnostic_sweep(cfg: &ExperimentConfig) -> Result<Vec<(SweepRow, DriftCurve<f64>)>> {
    cfg.validate()?;
    cfg.h_list
        .iter()
        .map(|&h| {
            let run = diagnostic_run(cfg, h)?;
            Ok((SweepRow::from_run(h, &run), run.acl))
        })
        .collect()
}

/// Bilinear L-sweep for one seed.
pub fn bilinear_experiment(
    k: f64,
    ls: &[f64],
    trials: usize,
    window: f64,
    seed: u64,
    options: &BilinearOptions<f64>,
) -> Result<BilinearSweep<f64>> {
    Ok(bilinear_sweep(k, ls, trials, window, seed, options)?)
}
