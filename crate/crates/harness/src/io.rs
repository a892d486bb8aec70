//! Run directories: field files, manifests and the small helpers that keep
//! every written byte reproducible.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dnls_core::{ContinuumField64, Cx, LatticeField64, TorusGrid64};
use serde::{Deserialize, Serialize};

use crate::config::{hex_digest, ExperimentConfig};
use crate::error::{HarnessError, Result};

pub const MANIFEST_NAME: &str = "manifest.json";
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// Fixed 17-significant-digit float format used by every CSV file.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| HarnessError::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            create_dir(parent)?;
        }
    }
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

pub fn read_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| HarnessError::Numerical(format!("cannot serialise output: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Lattice,
    Continuum,
}

impl FieldKind {
    fn name(self) -> &'static str {
        match self {
            FieldKind::Lattice => "lattice",
            FieldKind::Continuum => "continuum",
        }
    }
}

/// A complex field on a torus grid as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub kind: FieldKind,
    pub grid: TorusGrid64,
    /// Lattice time `tau` (lattice fields) or `t` (continuum fields).
    pub time: f64,
    pub values: Vec<Cx<f64>>,
}

impl FieldFile {
    pub fn lattice(u: &LatticeField64, tau: f64) -> Self {
        Self {
            kind: FieldKind::Lattice,
            grid: *u.grid(),
            time: tau,
            values: u.values().to_vec(),
        }
    }

    pub fn continuum(f: &ContinuumField64, t: f64) -> Self {
        Self {
            kind: FieldKind::Continuum,
            grid: *f.grid(),
            time: t,
            values: f.values().to_vec(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.values.len() + 8));
        let time_key = match self.kind {
            FieldKind::Lattice => "tau",
            FieldKind::Continuum => "t",
        };
        let _ = writeln!(s, "# kind={}", self.kind.name());
        let _ = writeln!(s, "# m={}", self.grid.m());
        let _ = writeln!(s, "# spacing={}", fmt_f64(self.grid.spacing()));
        let _ = writeln!(s, "# {time_key}={}", fmt_f64(self.time));
        s.push_str("index,re,im\n");
        for (j, z) in self.values.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{}",
                self.grid.signed_index(j),
                fmt_f64(z.re),
                fmt_f64(z.im)
            );
        }
        s
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let bad = |msg: String| HarnessError::Config(format!("{}: {msg}", origin.display()));
        let mut kind = None;
        let mut m = None;
        let mut spacing = None;
        let mut time = None;
        let mut lines = text.lines();
        for line in lines.by_ref() {
            let Some(header) = line.strip_prefix('#') else {
                if line.trim() != "index,re,im" {
                    return Err(bad(format!("unexpected column header {line:?}")));
                }
                break;
            };
            let (key, value) = header
                .trim()
                .split_once('=')
                .ok_or_else(|| bad(format!("malformed header {line:?}")))?;
            let num = || value.parse::<f64>().map_err(|e| bad(format!("{key}: {e}")));
            match key {
                "kind" => {
                    kind = Some(match value {
                        "lattice" => FieldKind::Lattice,
                        "continuum" => FieldKind::Continuum,
                        other => return Err(bad(format!("unknown field kind {other:?}"))),
                    })
                }
                "m" => m = Some(value.parse::<usize>().map_err(|e| bad(format!("m: {e}")))?),
                "spacing" => spacing = Some(num()?),
                "tau" | "t" => time = Some(num()?),
                _ => {}
            }
        }
        let (Some(kind), Some(m), Some(spacing), Some(time)) = (kind, m, spacing, time) else {
            return Err(bad("missing kind, m, spacing or time header".into()));
        };
        let grid = TorusGrid64::new(m, spacing)?;
        let mut values = vec![Cx::new(f64::NAN, f64::NAN); m];
        let mut seen = 0usize;
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut cols = line.split(',');
            let (Some(i), Some(re), Some(im), None) =
                (cols.next(), cols.next(), cols.next(), cols.next())
            else {
                return Err(bad(format!("expected three columns in {line:?}")));
            };
            let i: i64 = i.trim().parse().map_err(|e| bad(format!("index: {e}")))?;
            let re: f64 = re.trim().parse().map_err(|e| bad(format!("re: {e}")))?;
            let im: f64 = im.trim().parse().map_err(|e| bad(format!("im: {e}")))?;
            values[grid.slot(i)] = Cx::new(re, im);
            seen += 1;
        }
        if seen != m {
            return Err(bad(format!("expected {m} rows, found {seen}")));
        }
        Ok(Self {
            kind,
            grid,
            time,
            values,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&read_string(path)?, path)
    }

    pub fn into_lattice(self) -> Result<LatticeField64> {
        Ok(LatticeField64::new(self.grid, self.values)?)
    }
}

/// One written file with its digest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub outputs: Vec<OutputEntry>,
    pub summary: serde_json::Value,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_NAME);
        let text = read_string(&path)?;
        serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }
}

/// Collects files under one run directory and writes the manifest last.
#[derive(Debug)]
pub struct RunWriter {
    root: PathBuf,
    outputs: Vec<OutputEntry>,
}

impl RunWriter {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        create_dir(&root)?;
        Ok(Self {
            root,
            outputs: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, relative: &str, bytes: &[u8]) -> Result<()> {
        write_bytes(&self.root.join(relative), bytes)?;
        self.outputs.push(OutputEntry {
            path: relative.to_string(),
            sha256: hex_digest(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, relative: &str, value: &T) -> Result<()> {
        let s = to_json_pretty(value)?;
        self.write(relative, s.as_bytes())
    }

    pub fn finish(
        self,
        command: &str,
        cfg: &ExperimentConfig,
        summary: serde_json::Value,
    ) -> Result<PathBuf> {
        let manifest = Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            command: command.to_string(),
            config_hash: cfg.hash(),
            config: cfg.clone(),
            outputs: self.outputs,
            summary,
        };
        let s = to_json_pretty(&manifest)?;
        write_bytes(&self.root.join(MANIFEST_NAME), s.as_bytes())?;
        Ok(self.root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_csv_round_trips_bits() {
        let grid = TorusGrid64::new(8, 0.1).unwrap();
        let u = LatticeField64::from_fn(grid, |n| {
            Cx::new(1.0 / (n as f64 + 9.0), (n as f64).sin() * 1e-300)
        })
        .unwrap();
        let file = FieldFile::lattice(&u, 1.0 / 3.0);
        let text = file.to_csv();
        assert!(text.starts_with("# kind=lattice\n# m=8\n"));
        let back = FieldFile::parse(&text, Path::new("mem")).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.into_lattice().unwrap(), u);
    }

    #[test]
    fn truncated_field_is_rejected() {
        let grid = TorusGrid64::new(4, 0.5).unwrap();
        let text = FieldFile::lattice(&LatticeField64::zeros(grid), 0.0).to_csv();
        let cut: String = text.lines().take(7).map(|l| format!("{l}\n")).collect();
        assert!(FieldFile::parse(&cut, Path::new("mem")).is_err());
    }
}
