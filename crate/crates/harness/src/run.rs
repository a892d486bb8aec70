//! Full single-`h` pipeline persisted to a run directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dnls_core::diagnostics::{NormSpec, SpacetimeAccumulator};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiments::{diagnostic_run, SnapshotRecord};
use crate::io::{fmt_f64, FieldFile, Manifest, RunWriter};
use crate::report::{acl_csv, render_report, AclSummary, Format};
use crate::study::{run_convergence_study, run_h, ConvergenceRow, ConvergenceStudy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzSummary {
    pub h: f64,
    pub t_end: f64,
    pub l2_initial: f64,
    pub l6: f64,
    pub l4_linf: f64,
    pub l6_ratio: f64,
    pub l4_linf_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonresonanceSummary {
    pub h: f64,
    pub t_end: f64,
    pub tau_spacing: f64,
    pub psi_mixed: f64,
    pub phi_mixed: f64,
    pub psi_control: f64,
    pub phi_control: f64,
}

/// Headline numbers stored in the manifest of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleSummary {
    pub h: f64,
    pub sign: String,
    pub convergence: ConvergenceRow,
    pub identity_gap: f64,
    pub relative_mass_drift: f64,
    pub relative_energy_drift: f64,
    pub max_frequency_tail: f64,
    pub max_spatial_tail: f64,
    pub acl_fitted_exponent: Option<f64>,
    pub l6_ratio: f64,
    pub l4_linf_ratio: f64,
    pub psi_mixed: f64,
    pub phi_mixed: f64,
}

pub fn run_dir_name(command: &str, h: f64) -> String {
    format!("{command}_h{h}")
}

fn relative_drift(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let first = values.clone().next().unwrap_or(0.0);
    let spread = values.fold(0.0f64, |acc, v| acc.max((v - first).abs()));
    if first == 0.0 {
        spread
    } else {
        spread / first.abs()
    }
}

pub fn series_csv(records: &[SnapshotRecord]) -> String {
    let mut s = String::from("# schema_version=1\nt,tau,mass,energy,frequency_tail,spatial_tail\n");
    for r in records {
        let cols: Vec<String> = [
            r.t,
            r.tau,
            r.mass,
            r.energy,
            r.frequency_tail,
            r.spatial_tail,
        ]
        .into_iter()
        .map(fmt_f64)
        .collect();
        let _ = writeln!(s, "{}", cols.join(","));
    }
    s
}

/// Runs the convergence comparison and every diagnostic at one `h`, writing
/// the results under `cfg.output_dir`. Returns the run directory.
pub fn run_single(cfg: &ExperimentConfig, h: f64) -> Result<PathBuf> {
    let dir = cfg.output_dir.join(run_dir_name("single", h));
    run_single_in(cfg, h, &dir)
}

pub fn run_single_in(cfg: &ExperimentConfig, h: f64, dir: &Path) -> Result<PathBuf> {
    let mut cfg = cfg.clone();
    cfg.h_list = vec![h];
    cfg.validate()?;
    let (row, detail) = run_h(&cfg, h)?;
    let run = diagnostic_run(&cfg, h)?;

    let mut out = RunWriter::create(dir)?;
    out.write("config.toml", cfg.to_toml().as_bytes())?;
    out.write_json("convergence.json", &row)?;
    out.write("series.csv", series_csv(&run.snapshots).as_bytes())?;
    let acl = AclSummary::new(h, &run.acl);
    out.write("acl.csv", acl_csv(&run.acl).as_bytes())?;
    out.write_json("acl.json", &acl)?;
    let st = &run.strichartz;
    out.write_json(
        "strichartz.json",
        &StrichartzSummary {
            h,
            t_end: cfg.t_end,
            l2_initial: st.l2_initial,
            l6: st.l6,
            l4_linf: st.l4_linf,
            l6_ratio: st.l6_ratio,
            l4_linf_ratio: st.l4_linf_ratio,
        },
    )?;
    let nr = &run.nonresonance;
    out.write_json(
        "nonres.json",
        &NonresonanceSummary {
            h,
            t_end: cfg.t_end,
            tau_spacing: run.tau_spacing,
            psi_mixed: nr.psi_mixed,
            phi_mixed: nr.phi_mixed,
            psi_control: nr.psi_control,
            phi_control: nr.phi_control,
        },
    )?;
    for (i, (tau, u)) in run.states.iter().enumerate() {
        out.write(
            &format!("fields/u_{i:03}.csv"),
            FieldFile::lattice(u, *tau).to_csv().as_bytes(),
        )?;
    }
    let (psi_t, phi_t) = &run.final_components;
    out.write(
        "fields/psi_final.csv",
        FieldFile::continuum(psi_t, cfg.t_end).to_csv().as_bytes(),
    )?;
    out.write(
        "fields/phi_final.csv",
        FieldFile::continuum(phi_t, cfg.t_end).to_csv().as_bytes(),
    )?;

    let summary = SingleSummary {
        h,
        sign: cfg.sign.to_string(),
        convergence: row,
        identity_gap: detail.identity_gap,
        relative_mass_drift: relative_drift(run.snapshots.iter().map(|r| r.mass)),
        relative_energy_drift: relative_drift(run.snapshots.iter().map(|r| r.energy)),
        max_frequency_tail: run
            .snapshots
            .iter()
            .fold(0.0, |a, r| a.max(r.frequency_tail)),
        max_spatial_tail: run.snapshots.iter().fold(0.0, |a, r| a.max(r.spatial_tail)),
        acl_fitted_exponent: run.acl.fitted_exponent,
        l6_ratio: st.l6_ratio,
        l4_linf_ratio: st.l4_linf_ratio,
        psi_mixed: nr.psi_mixed,
        phi_mixed: nr.phi_mixed,
    };
    let value = serde_json::to_value(&summary)
        .map_err(|e| HarnessError::Numerical(format!("cannot serialise summary: {e}")))?;
    out.finish("single", &cfg, value)
}

/// Convergence study written as `report.csv`, `report.json` and a manifest
/// under `dir`.
pub fn converge_in(cfg: &ExperimentConfig, jobs: usize, dir: &Path) -> Result<ConvergenceStudy> {
    let study = run_convergence_study(cfg, jobs)?;
    let mut out = RunWriter::create(dir)?;
    out.write(
        "report.csv",
        render_report(&study.report, Format::Csv)?.as_bytes(),
    )?;
    out.write(
        "report.json",
        render_report(&study.report, Format::Json)?.as_bytes(),
    )?;
    let gaps: Vec<f64> = study.details.iter().map(|d| d.identity_gap).collect();
    let summary = serde_json::json!({ "rows": study.report.rows.len(), "identity_gap": gaps });
    out.finish("converge", cfg, summary)?;
    Ok(study)
}

/// `L^q_tau l^p_n` norm over the stored lattice snapshots of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoredNorm {
    pub h: f64,
    pub q: f64,
    pub p: f64,
    pub admissible: bool,
    pub snapshots: usize,
    pub lattice_norm: f64,
    /// `lattice_norm / h^{1 - 1/p - 2/q}`, the matching continuum scale.
    pub continuum_scaled: f64,
}

pub fn stored_norm(dir: &Path, q: f64, p: f64) -> Result<StoredNorm> {
    let manifest = Manifest::read(dir)?;
    let spec = NormSpec::new(q, p)?;
    let mut acc = SpacetimeAccumulator::new(spec);
    let mut h = None;
    for entry in manifest
        .outputs
        .iter()
        .filter(|o| o.path.starts_with("fields/u_"))
    {
        let u = FieldFile::read(&dir.join(&entry.path))?;
        let tau = u.time;
        let u = u.into_lattice()?;
        h = Some(u.h());
        acc.push_lattice(tau, &u);
    }
    let h = h.ok_or_else(|| {
        HarnessError::Config(format!("{}: run holds no lattice snapshots", dir.display()))
    })?;
    let lattice_norm = acc.finish()?;
    Ok(StoredNorm {
        h,
        q,
        p,
        admissible: spec.is_admissible(),
        snapshots: acc.len(),
        lattice_norm,
        continuum_scaled: lattice_norm / spec.scaling_power(h),
    })
}
