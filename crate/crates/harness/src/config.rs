//! Experiment configuration: TOML file, defaults, validation, and hashing.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dnls_core::spectral::DEFAULT_H0;
use dnls_core::{Nonlinearity, TorusGrid64};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};
use crate::profiles::ProfileSpec;

/// Sign of the cubic term, serialized as `defocusing`, `focusing` or `linear`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sign(pub Nonlinearity);

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.0.name())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Nonlinearity>()
            .map(Sign)
            .map_err(serde::de::Error::custom)
    }
}

impl FromStr for Sign {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<Nonlinearity>()
            .map(Sign)
            .map_err(|e| HarnessError::Config(e.to_string()))
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AclSection {
    pub kappas: Vec<f64>,
}

impl Default for AclSection {
    fn default() -> Self {
        Self {
            kappas: vec![4.0, 8.0, 16.0, 32.0, 64.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Lattice spacings, strictly decreasing.
    pub h_list: Vec<f64>,
    /// Horizon in continuum time; the lattice runs to `T / h^2`.
    #[serde(rename = "T", alias = "t_end")]
    pub t_end: f64,
    pub gamma: f64,
    pub sign: Sign,
    pub torus_length: f64,
    pub m_ref: usize,
    /// Lattice time step in `tau` units.
    pub dt: f64,
    /// Continuum reference time step in `t` units; a second run at half
    /// this step estimates the reference error.
    pub ref_dt: f64,
    /// Shared comparison times, uniform on `[-T, T]`.
    pub snapshot_count: usize,
    pub seed: u64,
    /// Admissibility gate: every `h` must be below it.
    pub h0: f64,
    /// Reference error estimate must stay below this fraction of the
    /// measured error.
    pub ref_tolerance: f64,
    /// Writes measured wall time into reports; off keeps reruns byte-identical.
    pub record_wall_time: bool,
    pub output_dir: PathBuf,
    pub psi: ProfileSpec,
    pub phi: ProfileSpec,
    pub acl: AclSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            h_list: vec![0.2, 0.1, 0.05, 0.025],
            t_end: 1.0,
            gamma: 0.5,
            sign: Sign(Nonlinearity::Defocusing),
            torus_length: 51.2,
            m_ref: 4096,
            dt: 0.05,
            ref_dt: 1e-3,
            snapshot_count: 21,
            seed: 0,
            h0: DEFAULT_H0,
            ref_tolerance: 0.1,
            record_wall_time: false,
            output_dir: PathBuf::from("runs"),
            psi: ProfileSpec::default_psi(),
            phi: ProfileSpec::default_phi(),
            acl: AclSection::default(),
        }
    }
}

impl ExperimentConfig {
    /// Reads a TOML file, or the `config` object of a run manifest when the
    /// path ends in `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let cfg: Self = if path.extension().is_some_and(|e| e == "json") {
            let v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            let inner = v.get("config").cloned().unwrap_or(v);
            serde_json::from_value(inner)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?
        };
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        self.sign.0
    }

    pub fn reference_grid(&self) -> Result<TorusGrid64> {
        Ok(TorusGrid64::from_length(self.torus_length, self.m_ref)?)
    }

    pub fn lattice_grid(&self, h: f64) -> Result<TorusGrid64> {
        TorusGrid64::with_spacing(self.torus_length, h).map_err(|e| {
            HarnessError::Config(format!(
                "h = {h} does not divide torus length {} into a power of two ({e})",
                self.torus_length
            ))
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.h_list.is_empty() {
            return bad("h_list is empty".into());
        }
        if self.h_list.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!(
                "h_list must be strictly decreasing, got {:?}",
                self.h_list
            ));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("T must be positive, got {}", self.t_end));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if !(self.torus_length > 0.0 && self.torus_length.is_finite()) {
            return bad(format!(
                "torus_length must be positive, got {}",
                self.torus_length
            ));
        }
        if !(self.dt > 0.0 && self.dt <= dnls_core::lattice::MAX_DT) {
            return bad(format!(
                "dt must lie in (0, {}], got {}",
                dnls_core::lattice::MAX_DT,
                self.dt
            ));
        }
        if !(self.ref_dt > 0.0 && self.ref_dt < self.t_end) {
            return bad(format!("ref_dt must lie in (0, T), got {}", self.ref_dt));
        }
        if self.snapshot_count < 2 {
            return bad("snapshot_count must be at least 2".into());
        }
        if !(self.ref_tolerance > 0.0) {
            return bad("ref_tolerance must be positive".into());
        }
        let fine = self.reference_grid()?;
        for &h in &self.h_list {
            if !(h > 0.0 && h < self.h0) {
                return bad(format!("h = {h} must lie in (0, h0 = {})", self.h0));
            }
            let lattice = self.lattice_grid(h)?;
            if fine.refinement_over(&lattice).is_none() {
                return bad(format!(
                    "reference grid with {} nodes does not refine the lattice with {} sites",
                    fine.m(),
                    lattice.m()
                ));
            }
        }
        for k in &self.acl.kappas {
            if !(*k > 0.0 && k.log2().fract() == 0.0) {
                return bad(format!("acl kappas must be powers of two, got {k}"));
            }
        }
        self.psi.validate("psi")?;
        self.phi.validate("phi")?;
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex_digest(json.as_bytes())
    }

    /// Uniform comparison times on `[-T, T]`.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let n = self.snapshot_count;
        (0..n)
            .map(|j| -self.t_end + 2.0 * self.t_end * j as f64 / (n - 1) as f64)
            .collect()
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig::default();
        let back: ExperimentConfig = toml::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn partial_file_uses_defaults() {
        let cfg: ExperimentConfig =
            toml::from_str("T = 0.5\nsign = \"focusing\"\nh_list = [0.1]\n").unwrap();
        assert_eq!(cfg.t_end, 0.5);
        assert_eq!(cfg.sign.0, Nonlinearity::Focusing);
        assert_eq!(cfg.m_ref, 4096);
        assert!(toml::from_str::<ExperimentConfig>("bogus = 1").is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let check = |f: fn(&mut ExperimentConfig)| {
            let mut c = ExperimentConfig::default();
            f(&mut c);
            assert!(matches!(c.validate(), Err(HarnessError::Config(_))));
        };
        check(|c| c.h_list = vec![0.1, 0.2]);
        check(|c| c.h_list = vec![0.3]);
        check(|c| c.h_list = vec![0.15]);
        check(|c| c.gamma = 1.0);
        check(|c| c.dt = 0.0);
        check(|c| c.m_ref = 1000);
        check(|c| c.acl.kappas = vec![3.0]);
        check(|c| c.snapshot_count = 1);
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
