//! Run configuration. Every physical default lives here, in the schema.

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use ptsym_core::dynamics::IntegratorConfig;
use ptsym_core::model::{ModelParams, TimeProfile};
use ptsym_core::FockSpace;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    Derived,
    Explicit,
}

/// Inclusive, evenly spaced grid axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn single(value: f64) -> Self {
        Self {
            start: value,
            stop: value,
            count: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + i as f64 * step
                }
            })
            .collect()
    }

    fn validate(&self, name: &str) -> Result<(), CliError> {
        if self.count == 0 {
            return Err(CliError::Config(format!(
                "scan axis {name} needs count >= 1"
            )));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Config(format!(
                "scan axis {name} bounds must be finite"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanGrid {
    #[serde(default = "default_omega_axis")]
    pub omega0: Axis,
    #[serde(default = "default_g_axis")]
    pub g0: Axis,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self {
            omega0: default_omega_axis(),
            g0: default_g_axis(),
        }
    }
}

fn default_omega_axis() -> Axis {
    Axis {
        start: 1.0,
        stop: 3.0,
        count: 3,
    }
}

fn default_g_axis() -> Axis {
    Axis {
        start: 0.0,
        stop: 1.0,
        count: 3,
    }
}

fn default_dim() -> usize {
    64
}

fn default_buffer() -> usize {
    8
}

fn default_gamma() -> f64 {
    FRAC_PI_4
}

fn default_omega() -> TimeProfile {
    TimeProfile::constant(2.0)
}

fn default_mode() -> CouplingMode {
    CouplingMode::Derived
}

fn default_t_end() -> f64 {
    5.0
}

fn default_dt() -> f64 {
    1e-3
}

fn default_order_dt() -> f64 {
    0.02
}

/// JSON run configuration; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_buffer")]
    pub buffer: usize,
    /// Metric angle γ in radians.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_omega")]
    pub omega: TimeProfile,
    #[serde(default = "default_mode")]
    pub coupling_mode: CouplingMode,
    /// G(t); required in explicit mode, forbidden in derived mode.
    #[serde(default)]
    pub g: Option<TimeProfile>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Coarser step of the RK4 order check; the check also runs at half of it.
    #[serde(default = "default_order_dt")]
    pub order_dt: f64,
    #[serde(default)]
    pub initial_n: usize,
    /// Number of eigenvalues reported by `spectrum`; defaults to dim/4.
    #[serde(default)]
    pub spectrum_count: Option<usize>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub scan: ScanGrid,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config is valid")
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub gamma: Option<f64>,
    pub omega0: Option<f64>,
    pub g0: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// `--omega0` fixes a constant Ω; `--g0` switches to an explicit constant G.
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.dim {
            self.dim = v;
        }
        if let Some(v) = o.gamma {
            self.gamma = v;
        }
        if let Some(v) = o.omega0 {
            self.omega = TimeProfile::constant(v);
            self.scan.omega0 = Axis::single(v);
        }
        if let Some(v) = o.g0 {
            self.coupling_mode = CouplingMode::Explicit;
            self.g = Some(TimeProfile::constant(v));
            self.scan.g0 = Axis::single(v);
        }
        if let Some(v) = o.dt {
            self.dt = v;
        }
        if let Some(v) = o.t_end {
            self.t_end = v;
        }
        if let Some(v) = &o.out {
            self.output_path = Some(v.clone());
        }
    }

    pub fn space(&self) -> Result<FockSpace, CliError> {
        Ok(FockSpace::new(self.dim, self.buffer)?)
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        let space = self.space()?;
        let p = match (self.coupling_mode, &self.g) {
            (CouplingMode::Derived, None) => {
                ModelParams::derived(space, self.omega.clone(), self.gamma)?
            }
            (CouplingMode::Explicit, Some(g)) => {
                ModelParams::explicit(space, self.omega.clone(), g.clone(), self.gamma)?
            }
            (CouplingMode::Derived, Some(_)) => {
                return Err(CliError::Config(
                    "g is only allowed in explicit mode".into(),
                ))
            }
            (CouplingMode::Explicit, None) => {
                return Err(CliError::Config("explicit mode needs a g profile".into()))
            }
        };
        Ok(p)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig, CliError> {
        Ok(IntegratorConfig::new(self.dt, self.t_end)?)
    }

    pub fn spectrum_count(&self) -> usize {
        self.spectrum_count.unwrap_or(self.dim / 4)
    }

    /// Checks every invariant shared by the subcommands.
    pub fn validate(&self) -> Result<(), CliError> {
        let space = self.space()?;
        self.params()?;
        self.integrator()?;
        if !(self.order_dt.is_finite() && self.order_dt > 0.0) {
            return Err(CliError::Config("order_dt must be positive".into()));
        }
        if self.initial_n >= space.interior() {
            return Err(CliError::Config(format!(
                "initial_n {} must be below dim - buffer = {}",
                self.initial_n,
                space.interior()
            )));
        }
        if self.spectrum_count() > self.dim / 4 {
            return Err(CliError::Config(format!(
                "spectrum_count {} exceeds dim/4 = {}",
                self.spectrum_count(),
                self.dim / 4
            )));
        }
        self.scan.omega0.validate("omega0")?;
        self.scan.g0.validate("g0")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        assert_eq!(c.dim, 64);
        assert_eq!(c.buffer, 8);
        assert_eq!(c.dt, 1e-3);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse(r#"{"dimm": 64}"#).is_err());
        assert!(
            RunConfig::parse(r#"{"omega": {"kind": "constant", "value": 1, "x": 2}}"#).is_err()
        );
        assert!(RunConfig::parse(
            r#"{"scan": {"omega0": {"start": 0, "stop": 1, "count": 2, "n": 1}}}"#
        )
        .is_err());
    }

    #[test]
    fn mode_and_profile_must_agree() {
        let c = RunConfig::parse(r#"{"coupling_mode": "explicit"}"#).unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::parse(r#"{"g": {"kind": "constant", "value": 1}}"#).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn small_dim_rejected() {
        let c = RunConfig::parse(r#"{"dim": 4, "buffer": 1}"#).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn axis_values() {
        let a = Axis {
            start: 0.0,
            stop: 1.0,
            count: 3,
        };
        assert_eq!(a.values(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Axis::single(2.0).values(), vec![2.0]);
    }

    #[test]
    fn overrides() {
        let mut c = RunConfig::default();
        c.apply(&Overrides {
            g0: Some(0.5),
            omega0: Some(1.0),
            ..Default::default()
        });
        assert_eq!(c.coupling_mode, CouplingMode::Explicit);
        assert_eq!(c.scan.g0.values(), vec![0.5]);
        assert_eq!(c.omega, TimeProfile::constant(1.0));
    }
}
