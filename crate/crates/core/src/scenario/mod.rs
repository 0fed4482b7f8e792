//! Declarative scenario files, parameter sweeps, g₀ fitting and coupling
//! optimization.
//!
//! Scenario files are TOML. All frequencies and rates are ordinary
//! frequencies in Hz, powers in W, temperatures in K; conversion to angular
//! units happens on load.
//!
//! ```toml
//! schema = 1
//! name = "reference"
//!
//! [device]
//! freq_a = 193.411e12
//! freq_b = 193.4178e12
//! freq_c = 6.801e9
//! kappa_a_i = 717e6
//! kappa_a_e = 206e6
//! kappa_b_i = 466e6
//! kappa_b_e = 134e6
//! kappa_c_i = 12.8e6
//! kappa_c_e = 4.4e6
//! g0 = 1.2e3
//! mu = 3.4e9
//!
//! [pump]          # frequency defaults to freq_a
//! power = 1e-6
//!
//! [microwave]     # frequency defaults to freq_c
//! power = 1e-9
//!
//! [sweep]
//! axis = "pump_frequency"
//! start = 193.405e12
//! stop = 193.424e12
//! count = 401
//! outputs = ["anti_stokes_per_uw", "stokes_per_uw"]
//! ```
//!
//! Optional sections: `[hybridization]`, `[calibration]`, `[filters]`,
//! `[detector]`, `[model]`, `[fit]`, `[optimize]`.

mod fit;
mod sweep;

pub use fit::{fit_g0, optimize_coupling, CouplingBounds, CouplingOptimum, FitRequest};
pub use sweep::{run_sweep, Output, SweepAxis, SweepResult, SweepScenario};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{angular, ordinary};
use crate::error::{Error, Result};
use crate::hybridization::BareOpticalModes;
use crate::measurement::{CalibrationChain, DetectorModel, FilterCascade};
use crate::params::{validate_device_params, DeviceParams, RawDeviceParams};
use crate::transduction::{Backaction, SidebandWeighting};

/// Scenario schema version understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Device parameters in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSpec {
    pub freq_a: f64,
    pub freq_b: f64,
    pub freq_c: f64,
    pub kappa_a_i: f64,
    pub kappa_a_e: f64,
    pub kappa_b_i: f64,
    pub kappa_b_e: f64,
    pub kappa_c_i: f64,
    pub kappa_c_e: f64,
    pub g0: f64,
    pub mu: f64,
}

impl DeviceSpec {
    pub fn to_params(&self) -> Result<DeviceParams> {
        validate_device_params(RawDeviceParams {
            omega_a: angular(self.freq_a),
            omega_b: angular(self.freq_b),
            omega_c: angular(self.freq_c),
            kappa_a_i: angular(self.kappa_a_i),
            kappa_a_e: angular(self.kappa_a_e),
            kappa_b_i: angular(self.kappa_b_i),
            kappa_b_e: angular(self.kappa_b_e),
            kappa_c_i: angular(self.kappa_c_i),
            kappa_c_e: angular(self.kappa_c_e),
            g0: angular(self.g0),
            mu: angular(self.mu),
        })
        .map_err(|e| match e {
            Error::InvalidParameter { field, reason } => {
                let field = field.replace("omega_", "freq_");
                Error::InvalidParameter {
                    field: format!("device.{field}"),
                    reason,
                }
            }
            other => other,
        })
    }

    pub fn from_params(p: &DeviceParams) -> Self {
        Self {
            freq_a: ordinary(p.omega_a()),
            freq_b: ordinary(p.omega_b()),
            freq_c: ordinary(p.omega_c()),
            kappa_a_i: ordinary(p.kappa_a_i()),
            kappa_a_e: ordinary(p.kappa_a_e()),
            kappa_b_i: ordinary(p.kappa_b_i()),
            kappa_b_e: ordinary(p.kappa_b_e()),
            kappa_c_i: ordinary(p.kappa_c_i()),
            kappa_c_e: ordinary(p.kappa_c_e()),
            g0: ordinary(p.g0()),
            mu: ordinary(p.mu()),
        }
    }
}

/// A drive tone. An absent frequency tracks the mode it nominally drives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub frequency: Option<f64>,
    pub power: f64,
}

/// Bare (uncoupled) racetrack frequencies at zero bias and their DC tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridizationSpec {
    pub bare_freq_a: f64,
    pub bare_freq_b: f64,
    /// DC tuning of the bare b resonance (Hz/V).
    pub tuning_per_volt: f64,
    /// Operating bias (V) when bias is not the sweep axis.
    #[serde(default)]
    pub bias: f64,
}

impl HybridizationSpec {
    pub fn bare_modes(&self, mu: f64) -> Result<BareOpticalModes> {
        BareOpticalModes::new(
            angular(self.bare_freq_a),
            angular(self.bare_freq_b),
            mu,
            angular(self.tuning_per_volt),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingSpec {
    #[default]
    Equal,
    /// Experimental supermode-coefficient weighting.
    Supermode,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// Include conversion backaction in the steady-state solve.
    #[serde(default)]
    pub backaction: bool,
    #[serde(default)]
    pub sideband_weighting: WeightingSpec,
    /// Bath temperature (K) for thermal outputs.
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub outputs: Vec<String>,
    /// Point count from which evaluation runs in parallel.
    #[serde(default = "default_parallel_threshold")]
    pub parallel_threshold: usize,
}

fn default_parallel_threshold() -> usize {
    64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    /// Measured on-chip efficiency per µW of pump in the feed waveguide.
    pub efficiency_per_uw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSpec {
    /// [lower, upper] bounds in Hz.
    pub kappa_b_e: [f64; 2],
    pub kappa_c_e: [f64; 2],
}

/// A parsed scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: Option<String>,
    pub device: DeviceSpec,
    pub pump: DriveSpec,
    pub microwave: DriveSpec,
    pub hybridization: Option<HybridizationSpec>,
    pub calibration: Option<CalibrationChain>,
    pub filters: Option<FilterCascade>,
    pub detector: Option<DetectorModel>,
    #[serde(default)]
    pub model: ModelSpec,
    pub sweep: Option<SweepSpec>,
    pub fit: Option<FitSpec>,
    pub optimize: Option<OptimizeSpec>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn toml_error(text: &str, e: &toml::de::Error) -> Error {
    let location = match e.span() {
        Some(span) => format!("line {}", line_of(text, span.start)),
        None => "input".to_string(),
    };
    Error::Parse {
        location,
        message: e.message().trim().to_string(),
    }
}

impl Scenario {
    /// Parse and check the schema version. Semantic validation happens when
    /// the scenario is turned into a runnable form.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
        match table.get("schema") {
            None => {
                return Err(Error::Parse {
                    location: "schema".into(),
                    message: format!("missing `schema` field (this build reads schema {SCHEMA_VERSION})"),
                })
            }
            Some(toml::Value::Integer(v)) if *v == i64::from(SCHEMA_VERSION) => {}
            Some(other) => {
                return Err(Error::Parse {
                    location: "schema".into(),
                    message: format!("unsupported schema {other}; this build reads schema {SCHEMA_VERSION}"),
                })
            }
        }
        toml::from_str(text).map_err(|e| toml_error(text, &e))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse { location, message } => Error::Parse {
                location: format!("{}:{location}", path.display()),
                message,
            },
            other => other,
        })
    }

    /// Name used for output files.
    pub fn name_or<'a>(&'a self, fallback: &'a str) -> &'a str {
        self.name.as_deref().unwrap_or(fallback)
    }

    /// Validated operating setup shared by every subcommand.
    pub fn setup(&self) -> Result<Setup> {
        let device = self.device.to_params()?;
        for (field, d) in [("pump", &self.pump), ("microwave", &self.microwave)] {
            if let Some(f) = d.frequency {
                if !(f.is_finite() && f > 0.0) {
                    return Err(Error::invalid(format!("{field}.frequency"), format!("must be > 0, got {f}")));
                }
            }
            if !(d.power.is_finite() && d.power >= 0.0) {
                return Err(Error::invalid(format!("{field}.power"), format!("must be >= 0, got {}", d.power)));
            }
        }
        let hybridization = match &self.hybridization {
            Some(h) => Some((h.bare_modes(device.mu())?, h.bias)),
            None => None,
        };
        if let Some(c) = &self.calibration {
            c.validate().map_err(|e| prefix(e, "calibration"))?;
        }
        if let Some(f) = &self.filters {
            f.validate().map_err(|e| prefix(e, "filters"))?;
        }
        if let Some(d) = &self.detector {
            d.validate().map_err(|e| prefix(e, "detector"))?;
        }
        if let Some(t) = self.model.temperature {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::invalid("model.temperature", format!("must be > 0, got {t}")));
            }
        }
        Ok(Setup {
            device,
            pump_frequency: self.pump.frequency.map(angular),
            pump_power: self.pump.power,
            mw_frequency: self.microwave.frequency.map(angular),
            mw_power: self.microwave.power,
            hybridization,
            calibration: self.calibration,
            filters: self.filters.clone(),
            detector: self.detector.unwrap_or_default(),
            backaction: if self.model.backaction {
                Backaction::Included
            } else {
                Backaction::Excluded
            },
            weighting: self.model.sideband_weighting,
            temperature: self.model.temperature,
        })
    }
}

fn prefix(e: Error, section: &str) -> Error {
    match e {
        Error::InvalidParameter { field, reason } => Error::InvalidParameter {
            field: format!("{section}.{field}"),
            reason,
        },
        other => other,
    }
}

/// Validated scenario contents in internal (angular) units.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub device: DeviceParams,
    /// Pump frequency (rad/s); `None` tracks mode a.
    pub pump_frequency: Option<f64>,
    pub pump_power: f64,
    /// Microwave frequency (rad/s); `None` tracks mode c.
    pub mw_frequency: Option<f64>,
    pub mw_power: f64,
    /// Bare modes and operating bias.
    pub hybridization: Option<(BareOpticalModes, f64)>,
    pub calibration: Option<CalibrationChain>,
    pub filters: Option<FilterCascade>,
    pub detector: DetectorModel,
    pub backaction: Backaction,
    pub weighting: WeightingSpec,
    pub temperature: Option<f64>,
}

impl Setup {
    pub(crate) fn sideband_weighting(&self, theta: Option<f64>) -> SidebandWeighting {
        match self.weighting {
            WeightingSpec::Equal => SidebandWeighting::Equal,
            WeightingSpec::Supermode => SidebandWeighting::SupermodeCoefficients {
                theta: theta.unwrap_or(std::f64::consts::FRAC_PI_4),
            },
        }
    }
}
