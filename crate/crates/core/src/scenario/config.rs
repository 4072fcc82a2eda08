//! Scenario configuration files (TOML).
//!
//! ```toml
//! base_rate = 1.0        # every frequency below is a multiple of this
//! seed = 7
//! output = "out/run.csv"
//!
//! [kernel]
//! type = "exponential"   # exponential | box | gaussian | tabulated | zero
//! gamma = 1.0
//! gamma0 = 2.0
//!
//! [control]
//! mode = "random"        # off | constant | random
//! tau = 0.02             # times are in units of 1/base_rate
//! kappa = 0.01
//! psi = 0.2              # accumulated phase per period
//!
//! [grid]
//! t_max = 10.0
//! n_steps = 10000
//!
//! [initial]
//! rho11 = 1.0
//! rho10_re = 0.0
//! rho10_im = 0.0
//!
//! [sweep]
//! parameter = "kernel.gamma0"
//! values = [0.2, 1.0, 5.0]
//! ```
//!
//! `oracle-compare` additionally reads a `[bath]` table.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::control::PulseSequence;
use crate::error::{Error, Result};
use crate::kernels::{box_detuning, KernelSpec};
use crate::oracle::BathDistribution;
use crate::propagator::TimeGrid;
use crate::tcl::QubitState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "unit")]
    pub base_rate: f64,
    #[serde(default)]
    pub seed: u64,
    pub output: PathBuf,
    /// Overrides the Overhauser shift implied by the kernel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overhauser: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
    #[serde(default)]
    pub control: ControlConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathConfig>,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Exponential { gamma: f64, gamma0: f64 },
    Box { acal: f64, n: usize, omega: f64 },
    Gaussian { acal: f64, n: usize, nu: f64 },
    Tabulated { dt: f64, re: Vec<f64>, im: Vec<f64> },
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ControlMode {
    #[default]
    Off,
    Constant,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    #[serde(default)]
    pub mode: ControlMode,
    #[serde(default = "unit")]
    pub tau: f64,
    #[serde(default = "unit")]
    pub kappa: f64,
    #[serde(default)]
    pub psi: f64,
    /// Defaults to the scenario seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for ControlConfig {
    fn default() -> Self {
        ControlConfig { mode: ControlMode::Off, tau: 1.0, kappa: 1.0, psi: 0.0, seed: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_max: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default = "unit")]
    pub rho11: f64,
    #[serde(default)]
    pub rho10_re: f64,
    #[serde(default)]
    pub rho10_im: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig { rho11: 1.0, rho10_re: 0.0, rho10_im: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted path into the config, e.g. `kernel.gamma0`.
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub n: usize,
    pub coupling_mean: f64,
    #[serde(default)]
    pub coupling_spread: f64,
    #[serde(default)]
    pub freq_mean: f64,
    #[serde(default)]
    pub freq_spread: f64,
    pub omega0: f64,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_rate.is_finite() && self.base_rate > 0.0) {
            return Err(Error::Config(format!("base_rate must be > 0, got {}", self.base_rate)));
        }
        self.grid()?;
        if self.kernel.is_some() {
            self.kernel_spec()?;
        }
        self.pulses()?;
        self.initial_state()?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config("sweep values must be nonempty".into()));
            }
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config("sweep values must be finite".into()));
            }
        }
        if let Some(bath) = &self.bath {
            if bath.n == 0 {
                return Err(Error::Config("bath.n must be >= 1".into()));
            }
        }
        Ok(())
    }

    fn freq(&self, v: f64) -> f64 {
        v * self.base_rate
    }

    fn time(&self, v: f64) -> f64 {
        v / self.base_rate
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.time(self.grid.t_max), self.grid.n_steps).map_err(config_error)
    }

    /// The kernel in physical units. For `oracle-compare` without a
    /// `[kernel]` table the box kernel matching a degenerate bath is used.
    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        let Some(kernel) = &self.kernel else {
            return self.implied_box_kernel();
        };
        let spec = match kernel {
            KernelConfig::Exponential { gamma, gamma0 } => KernelSpec::exponential(self.freq(*gamma), self.freq(*gamma0)),
            KernelConfig::Box { acal, n, omega } => KernelSpec::box_model(self.freq(*acal), *n, self.freq(*omega)),
            KernelConfig::Gaussian { acal, n, nu } => KernelSpec::gaussian_bath(self.freq(*acal), *n, self.freq(*nu)),
            KernelConfig::Tabulated { dt, re, im } => {
                if re.len() != im.len() {
                    return Err(Error::Config("tabulated kernel needs re and im of equal length".into()));
                }
                let scale = self.base_rate * self.base_rate;
                let values = re.iter().zip(im).map(|(r, i)| Complex64::new(r * scale, i * scale)).collect();
                KernelSpec::tabulated(self.time(*dt), values)
            }
            KernelConfig::Zero => KernelSpec::zero(self.time(self.grid.t_max)),
        };
        spec.map_err(config_error)
    }

    fn implied_box_kernel(&self) -> Result<KernelSpec> {
        let bath = self.bath.as_ref().ok_or_else(|| Error::Config("missing [kernel] table".into()))?;
        if bath.coupling_spread != 0.0 || bath.freq_spread != 0.0 {
            return Err(Error::Config("a [kernel] table is required unless the bath is homogeneous".into()));
        }
        let acal = self.freq(bath.coupling_mean) * bath.n as f64;
        let omega = box_detuning(self.freq(bath.omega0), self.freq(bath.freq_mean), acal, bath.n).map_err(config_error)?;
        KernelSpec::box_model(acal, bath.n, omega).map_err(config_error)
    }

    /// Overhauser shift `h` used to return to the lab frame.
    pub fn overhauser_shift(&self) -> Result<f64> {
        if let Some(h) = self.overhauser {
            return Ok(self.freq(h));
        }
        Ok(self.kernel_spec()?.implied_overhauser())
    }

    pub fn pulses(&self) -> Result<PulseSequence> {
        let c = &self.control;
        let seed = c.seed.unwrap_or(self.seed);
        let seq = match c.mode {
            ControlMode::Off => Ok(PulseSequence::off()),
            ControlMode::Constant => PulseSequence::constant(self.time(c.tau), self.time(c.kappa), c.psi),
            ControlMode::Random => PulseSequence::random(self.time(c.tau), self.time(c.kappa), c.psi, seed),
        };
        seq.map_err(config_error)
    }

    pub fn initial_state(&self) -> Result<QubitState> {
        let i = &self.initial;
        QubitState::new(i.rho11, Complex64::new(i.rho10_re, i.rho10_im)).map_err(config_error)
    }

    pub fn bath_distribution(&self) -> Result<(BathDistribution, f64)> {
        let bath = self.bath.as_ref().ok_or_else(|| Error::Config("missing [bath] table".into()))?;
        let dist = BathDistribution {
            n: bath.n,
            coupling_mean: self.freq(bath.coupling_mean),
            coupling_spread: self.freq(bath.coupling_spread),
            freq_mean: self.freq(bath.freq_mean),
            freq_spread: self.freq(bath.freq_spread),
        };
        Ok((dist, self.freq(bath.omega0)))
    }

    /// Copy of this config with one dotted-path parameter replaced.
    pub fn with_parameter(&self, path: &str, value: f64) -> Result<Self> {
        let mut root = toml::Table::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        let mut parts = path.split('.').peekable();
        let mut table = &mut root;
        loop {
            let key = parts.next().ok_or_else(|| Error::Config("empty sweep parameter".into()))?;
            if parts.peek().is_none() {
                let slot = table
                    .get_mut(key)
                    .ok_or_else(|| Error::Config(format!("unknown sweep parameter '{path}'")))?;
                *slot = match slot {
                    toml::Value::Integer(_) => {
                        if value.fract() != 0.0 || value < 0.0 {
                            return Err(Error::Config(format!("'{path}' takes a nonnegative integer, got {value}")));
                        }
                        toml::Value::Integer(value as i64)
                    }
                    toml::Value::Float(_) => toml::Value::Float(value),
                    _ => return Err(Error::Config(format!("'{path}' is not numeric"))),
                };
                break;
            }
            table = table
                .get_mut(key)
                .and_then(|v| v.as_table_mut())
                .ok_or_else(|| Error::Config(format!("unknown sweep parameter '{path}'")))?;
        }
        let cfg: ScenarioConfig = root.try_into().map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}
