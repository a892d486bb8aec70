use std::fs;
use std::path::Path;

use dnls_core::spectral::continuum_spectrum;
use dnls_core::{ContinuumField64, Nonlinearity};
use dnls_harness::config::{ExperimentConfig, Sign};
use dnls_harness::io::{FieldFile, Manifest};
use dnls_harness::profiles::{Family, ProfileSpec};
use dnls_harness::run::{run_single, run_single_in, stored_norm};
use dnls_harness::study::{prepare, run_h};
use dnls_harness::{run_convergence_study, HarnessError};

fn small_config(dir: &Path) -> ExperimentConfig {
    ExperimentConfig {
        h_list: vec![0.2, 0.1],
        output_dir: dir.to_path_buf(),
        snapshot_count: 11,
        ..ExperimentConfig::default()
    }
}

fn gaussian(amplitude: f64, width: f64, center: f64) -> ProfileSpec {
    ProfileSpec {
        family: Family::Gaussian,
        amplitude,
        width,
        center,
        ..ProfileSpec::default()
    }
}

fn files_under(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn zero_data_gives_zero_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        psi: ProfileSpec::zero(),
        phi: ProfileSpec::zero(),
        ..small_config(tmp.path())
    };
    let study = run_convergence_study(&cfg, 2).unwrap();
    for row in &study.report.rows {
        assert_eq!(
            (row.err_psi, row.err_phi, row.longwave_err, row.ref_check),
            (0.0, 0.0, 0.0, 0.0)
        );
    }
}

#[test]
fn parallel_sweep_matches_sequential() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let a = run_convergence_study(&cfg, 1).unwrap();
    let b = run_convergence_study(&cfg, 4).unwrap();
    assert_eq!(a, b);
    let hs: Vec<f64> = a.report.rows.iter().map(|r| r.h).collect();
    assert_eq!(hs, cfg.h_list);
}

#[test]
fn single_run_is_self_describing_and_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let dir = run_single(&cfg, 0.2).unwrap();
    assert_eq!(dir, tmp.path().join("single_h0.2"));
    let first = files_under(&dir);
    let again = run_single_in(&cfg, 0.2, &tmp.path().join("again")).unwrap();
    assert_eq!(first, files_under(&again));

    let manifest = Manifest::read(&dir).unwrap();
    assert_eq!(manifest.command, "single");
    assert_eq!(manifest.config_hash, manifest.config.hash());
    for entry in &manifest.outputs {
        let bytes = fs::read(dir.join(&entry.path)).unwrap();
        assert_eq!(
            dnls_harness::config::hex_digest(&bytes),
            entry.sha256,
            "{}",
            entry.path
        );
    }
    // rerunning from the manifest alone reproduces the run
    let from_manifest = ExperimentConfig::load(&dir.join("manifest.json")).unwrap();
    let third = run_single_in(&from_manifest, 0.2, &tmp.path().join("third")).unwrap();
    assert_eq!(first, files_under(&third));

    let snaps: Vec<_> = manifest
        .outputs
        .iter()
        .filter(|o| o.path.starts_with("fields/u_"))
        .collect();
    assert_eq!(snaps.len(), cfg.snapshot_count);
    let u = FieldFile::read(&dir.join(&snaps[0].path)).unwrap();
    assert!((u.time + cfg.t_end / 0.04).abs() < 1e-9);
    assert_eq!(u.grid.m(), 256);
}

#[test]
fn stored_norms_follow_conservation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let dir = run_single(&cfg, 0.2).unwrap();
    let u0 = prepare(&cfg, 0.2).unwrap().u0;
    let l2 = dnls_core::lattice::mass(&u0).sqrt();
    let n = stored_norm(&dir, f64::INFINITY, 2.0).unwrap();
    assert!((n.lattice_norm - l2).abs() <= 1e-11 * l2);
    assert!(n.admissible);
    let n6 = stored_norm(&dir, 6.0, 6.0).unwrap();
    assert!(n6.lattice_norm > 0.0 && n6.lattice_norm.is_finite());
    assert!(
        (n6.continuum_scaled - n6.lattice_norm / 0.2f64.powf(0.5)).abs()
            <= 1e-12 * n6.continuum_scaled
    );
    assert!(matches!(
        stored_norm(tmp.path(), 6.0, 6.0),
        Err(HarnessError::Io { .. })
    ));
}

/// `sup_t ||(e^{-i t 4 sin^2(h xi/2)/h^2} - e^{-i t xi^2}) f_hat||` over the
/// snapshot times: the whole error of the linear lattice flow.
fn dispersion_gap(f: &ContinuumField64, h: f64, times: &[f64]) -> f64 {
    let grid = *f.grid();
    let coeffs = continuum_spectrum(f);
    times
        .iter()
        .map(|&t| {
            let s: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let xi = grid.wavenumber(j);
                    let lattice = 4.0 * (h * xi / 2.0).sin().powi(2) / (h * h);
                    let d = 2.0 * (0.5 * t * (lattice - xi * xi)).sin();
                    c.norm_sqr() * d * d
                })
                .sum();
            (s / grid.length()).sqrt()
        })
        .fold(0.0, f64::max)
}

#[test]
fn linear_mode_matches_free_schroedinger_flow() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        sign: Sign(Nonlinearity::Off),
        psi: gaussian(0.5, 4.0, 0.0),
        phi: gaussian(0.4, 4.0, 1.0),
        ..small_config(tmp.path())
    };
    let mut errors = Vec::new();
    for h in [0.2, 0.1, 0.05] {
        let (row, _) = run_h(&cfg, h).unwrap();
        let prep = prepare(&cfg, h).unwrap();
        let times = cfg.snapshot_times();
        let gap_psi = dispersion_gap(prep.state0.psi(), h, &times);
        let gap_phi = dispersion_gap(prep.state0.phi(), h, &times);
        assert!(
            (row.err_psi - gap_psi).abs() <= 1e-10,
            "h = {h}: {} vs {gap_psi}",
            row.err_psi
        );
        assert!(
            (row.err_phi - gap_phi).abs() <= 1e-10,
            "h = {h}: {} vs {gap_phi}",
            row.err_phi
        );
        errors.push(row.err_psi);
    }
    for w in errors.windows(2) {
        let r = w[0] / w[1];
        assert!(
            (3.8..=4.2).contains(&r),
            "second-order decay expected, ratio {r}"
        );
    }
}

#[test]
fn invalid_requests_map_to_exit_classes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let e = run_single(&cfg, 0.3).unwrap_err();
    assert_eq!(e.exit_code(), 2, "{e}");
    let e = run_single(&cfg, 0.15).unwrap_err();
    assert_eq!(e.exit_code(), 2, "{e}");

    // an output path blocked by a regular file
    let blocker = tmp.path().join("blocked");
    fs::write(&blocker, b"x").unwrap();
    let cfg = ExperimentConfig {
        output_dir: blocker,
        ..small_config(tmp.path())
    };
    let e = run_single(&cfg, 0.2).unwrap_err();
    assert_eq!(e.exit_code(), 4, "{e}");

    // focusing blow-up is not reachable at this size; a starved reference is
    let cfg = ExperimentConfig {
        ref_dt: 0.5,
        ref_tolerance: 1e-6,
        ..small_config(tmp.path())
    };
    let e = run_h(&cfg, 0.2).unwrap_err();
    assert_eq!(e.exit_code(), 3, "{e}");
    assert!(e.to_string().contains("h = 0.2"));
}
