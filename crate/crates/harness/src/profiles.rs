//! Named initial-profile families for `psi_0` and `phi_0`.

use dnls_core::{cis, ContinuumField64, Cx, TorusGrid64};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Zero,
    /// `A exp(-(x - c)^2 / (2 w^2)) e^{i k x}`
    Gaussian,
    /// `A sech((x - c) / w) e^{i k x}`
    Sech,
    /// `A e^{i 2 pi mode x / L}`
    PlaneWave,
    /// Two gaussians at `c -+ separation/2`.
    TwoBump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSpec {
    pub family: Family,
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    pub wavenumber: f64,
    pub mode: i64,
    pub separation: f64,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self {
            family: Family::Gaussian,
            amplitude: 1.0,
            width: 1.0,
            center: 0.0,
            wavenumber: 0.0,
            mode: 0,
            separation: 4.0,
        }
    }
}

impl ProfileSpec {
    pub fn zero() -> Self {
        Self {
            family: Family::Zero,
            ..Self::default()
        }
    }

    pub fn default_psi() -> Self {
        Self {
            amplitude: 0.8,
            width: 2.5,
            wavenumber: 0.3,
            ..Self::default()
        }
    }

    pub fn default_phi() -> Self {
        Self {
            amplitude: 0.6,
            width: 2.0,
            center: 1.0,
            wavenumber: -0.4,
            ..Self::default()
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let finite = [
            self.amplitude,
            self.width,
            self.center,
            self.wavenumber,
            self.separation,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(HarnessError::Config(format!(
                "{name}: profile parameters must be finite"
            )));
        }
        if matches!(
            self.family,
            Family::Gaussian | Family::Sech | Family::TwoBump
        ) && !(self.width > 0.0)
        {
            return Err(HarnessError::Config(format!(
                "{name}: width must be positive"
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64, length: f64) -> Cx<f64> {
        let a = self.amplitude;
        let carrier = cis(self.wavenumber * x);
        let gauss = |y: f64| (-(y * y) / (2.0 * self.width * self.width)).exp();
        match self.family {
            Family::Zero => Cx::new(0.0, 0.0),
            Family::Gaussian => carrier * (a * gauss(x - self.center)),
            Family::Sech => carrier * (a / ((x - self.center) / self.width).cosh()),
            Family::PlaneWave => cis(std::f64::consts::TAU * self.mode as f64 * x / length) * a,
            Family::TwoBump => {
                let s = self.separation / 2.0;
                carrier * (a * (gauss(x - self.center - s) + gauss(x - self.center + s)))
            }
        }
    }

    pub fn sample(&self, grid: &TorusGrid64) -> Result<ContinuumField64> {
        let length = grid.length();
        Ok(ContinuumField64::from_fn(*grid, |x| self.eval(x, length))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let g = ProfileSpec {
            amplitude: 2.0,
            width: 0.5,
            center: 1.0,
            ..ProfileSpec::default()
        };
        assert!((g.eval(1.0, 10.0).re - 2.0).abs() < 1e-15);
        assert!((g.eval(1.5, 10.0).re - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
        let s = ProfileSpec {
            family: Family::Sech,
            ..ProfileSpec::default()
        };
        assert!((s.eval(0.0, 10.0).re - 1.0).abs() < 1e-15);
        let p = ProfileSpec {
            family: Family::PlaneWave,
            mode: 2,
            ..ProfileSpec::default()
        };
        assert!((p.eval(2.5, 10.0) - Cx::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(ProfileSpec::zero().eval(0.3, 10.0), Cx::new(0.0, 0.0));
        let two = ProfileSpec {
            family: Family::TwoBump,
            separation: 6.0,
            ..ProfileSpec::default()
        };
        assert!((two.eval(3.0, 64.0).re - (1.0 + (-18.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn toml_names() {
        let p: ProfileSpec = toml::from_str("family = \"two_bump\"\nwidth = 0.7\n").unwrap();
        assert_eq!(p.family, Family::TwoBump);
        assert!(ProfileSpec {
            width: 0.0,
            ..ProfileSpec::default()
        }
        .validate("psi")
        .is_err());
    }
}
