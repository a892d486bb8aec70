//! Flat CSV and JSON reports. Every CSV starts with a `# schema_version=`
//! line followed by a header row; floats use [`fmt_f64`].

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use dnls_core::diagnostics::{BilinearSweep, DriftCurve};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::experiments::SweepRow;
use crate::io::{fmt_f64, read_string, to_json_pretty, write_bytes};
use crate::study::{ConvergenceReport, REPORT_SCHEMA_VERSION};

pub const CONVERGENCE_COLUMNS: [&str; 6] = [
    "h",
    "err_psi",
    "err_phi",
    "longwave_err",
    "ref_check",
    "seconds",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(HarnessError::Config(format!(
                "unknown report format {other:?}"
            ))),
        }
    }
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = format!(
        "# schema_version={REPORT_SCHEMA_VERSION}\n{}\n",
        header.join(",")
    );
    for row in rows {
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

pub fn convergence_csv(report: &ConvergenceReport) -> String {
    csv_table(
        &CONVERGENCE_COLUMNS,
        report.rows.iter().map(|r| {
            [
                r.h,
                r.err_psi,
                r.err_phi,
                r.longwave_err,
                r.ref_check,
                r.seconds,
            ]
            .into_iter()
            .map(fmt_f64)
            .collect()
        }),
    )
}

pub fn render_report(report: &ConvergenceReport, format: Format) -> Result<String> {
    if report.rows.is_empty() {
        return Err(HarnessError::Config(
            "refusing to emit an empty report".into(),
        ));
    }
    match format {
        Format::Csv => Ok(convergence_csv(report)),
        Format::Json => to_json_pretty(report),
    }
}

/// Writes the report to `path`.
pub fn emit_report(report: &ConvergenceReport, format: Format, path: &Path) -> Result<()> {
    let text = render_report(report, format)?;
    write_bytes(path, text.as_bytes())
}

pub fn read_json_report(path: &Path) -> Result<ConvergenceReport> {
    let text = read_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

pub fn acl_csv(curve: &DriftCurve<f64>) -> String {
    let threshold = curve.threshold();
    csv_table(
        &["kappa", "drift", "measurable"],
        curve
            .kappas
            .iter()
            .zip(&curve.drifts)
            .map(|(k, d)| vec![fmt_f64(*k), fmt_f64(*d), (*d > threshold).to_string()]),
    )
}

/// Serializable view of a drift curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AclSummary {
    pub h: f64,
    pub kappas: Vec<f64>,
    pub drifts: Vec<f64>,
    pub fitted_exponent: Option<f64>,
    pub mass_floor: f64,
    pub threshold: f64,
    pub initial_mass: f64,
}

impl AclSummary {
    pub fn new(h: f64, curve: &DriftCurve<f64>) -> Self {
        Self {
            h,
            kappas: curve.kappas.clone(),
            drifts: curve.drifts.clone(),
            fitted_exponent: curve.fitted_exponent,
            mass_floor: curve.mass_floor,
            threshold: curve.threshold(),
            initial_mass: curve.initial_mass,
        }
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    csv_table(
        &[
            "h",
            "l6_ratio",
            "l4_linf_ratio",
            "psi_mixed",
            "phi_mixed",
            "psi_control",
            "phi_control",
        ],
        rows.iter().map(|r| {
            [
                r.h,
                r.l6_ratio,
                r.l4_linf_ratio,
                r.psi_mixed,
                r.phi_mixed,
                r.psi_control,
                r.phi_control,
            ]
            .into_iter()
            .map(fmt_f64)
            .collect()
        }),
    )
}

/// Per-`L` summary of one seed's bilinear sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearRow {
    pub seed: u64,
    pub k: f64,
    pub l: f64,
    pub window: f64,
    pub trials: usize,
    pub median_lhs: f64,
    pub median_ratio: f64,
    pub max_ratio: f64,
}

pub fn bilinear_rows(sweep: &BilinearSweep<f64>) -> Vec<BilinearRow> {
    sweep
        .records
        .iter()
        .map(|r| BilinearRow {
            seed: r.seed,
            k: r.k,
            l: r.l,
            window: r.window,
            trials: r.lhs.len(),
            median_lhs: r.median_lhs,
            median_ratio: r.median_ratio,
            max_ratio: r.max_ratio,
        })
        .collect()
}

pub fn bilinear_csv(rows: &[BilinearRow]) -> String {
    csv_table(
        &[
            "seed",
            "K",
            "L",
            "window",
            "trials",
            "median_lhs",
            "median_ratio",
            "max_ratio",
        ],
        rows.iter().map(|r| {
            vec![
                r.seed.to_string(),
                fmt_f64(r.k),
                fmt_f64(r.l),
                fmt_f64(r.window),
                r.trials.to_string(),
                fmt_f64(r.median_lhs),
                fmt_f64(r.median_ratio),
                fmt_f64(r.max_ratio),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::study::ConvergenceRow;

    #[test]
    fn empty_report_is_rejected() {
        let report = ConvergenceReport {
            schema_version: REPORT_SCHEMA_VERSION,
            rows: vec![],
        };
        assert!(matches!(
            render_report(&report, Format::Csv),
            Err(HarnessError::Config(_))
        ));
        assert!(render_report(&report, Format::Json).is_err());
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let report = ConvergenceReport {
            schema_version: REPORT_SCHEMA_VERSION,
            rows: vec![ConvergenceRow {
                h: 0.1,
                err_psi: 1.0 / 3.0,
                err_phi: 0.0,
                longwave_err: 2e-3,
                ref_check: 1e-5,
                seconds: 0.0,
            }],
        };
        let csv = convergence_csv(&report);
        let line = csv.lines().nth(2).unwrap();
        let first: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(first, 1.0 / 3.0);
        assert!(line.starts_with("1.0000000000000001e-1,3.3333333333333331e-1,"));
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(Format::from_path(Path::new("a/b.CSV")), Some(Format::Csv));
        assert_eq!(Format::from_path(Path::new("r.json")), Some(Format::Json));
        assert_eq!(Format::from_path(Path::new("r.txt")), None);
    }
}
