use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Scenario, Setup};
use crate::constants::{angular, ordinary};
use crate::error::{Error, Result};
use crate::hybridization::supermode_frequencies;
use crate::measurement::{snspd_count_rate, FilterCascade};
use crate::params::{DeviceParams, MicrowaveDrive, PumpDrive};
use crate::transduction::{
    conversion_bandwidth, efficiency_full, efficiency_low_c, pair_generation_rate, sideband_efficiencies,
    steady_state_solve, thermal_occupancy, OperatingPoint, SolverOptions,
};
use crate::units::apply_loss_db;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Pump frequency (Hz).
    PumpFrequency,
    /// DC bias on the tuning electrodes (V); needs `[hybridization]`.
    BiasVoltage,
    /// Microwave drive frequency (Hz).
    MicrowaveFrequency,
    /// Pump power in the feed waveguide (W).
    PumpPower,
    /// Bath temperature (K).
    Temperature,
}

impl SweepAxis {
    /// Column header of the axis.
    pub fn column(&self) -> &'static str {
        match self {
            SweepAxis::PumpFrequency => "pump_frequency_hz",
            SweepAxis::BiasVoltage => "bias_voltage_v",
            SweepAxis::MicrowaveFrequency => "microwave_frequency_hz",
            SweepAxis::PumpPower => "pump_power_w",
            SweepAxis::Temperature => "temperature_k",
        }
    }
}

macro_rules! outputs {
    ($($variant:ident => $name:literal, $doc:literal;)*) => {
        /// Quantities a sweep can tabulate.
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum Output {
            $(#[doc = $doc] $variant,)*
        }

        impl Output {
            pub const ALL: &'static [Output] = &[$(Output::$variant),*];

            pub fn name(&self) -> &'static str {
                match self {
                    $(Output::$variant => $name,)*
                }
            }

            pub fn description(&self) -> &'static str {
                match self {
                    $(Output::$variant => $doc,)*
                }
            }
        }
    };
}

outputs! {
    EfficiencyLowC => "efficiency_low_c", "On-chip low-cooperativity efficiency.";
    EfficiencyFull => "efficiency_full", "On-chip efficiency with conversion backaction.";
    EfficiencySteadyState => "efficiency_steady_state", "Efficiency from the mean-field solver (model.backaction selects the variant).";
    EfficiencyPerUw => "efficiency_per_uw", "Low-cooperativity efficiency per µW of pump.";
    Cooperativity => "cooperativity", "Cooperativity C.";
    NPumpPhotons => "n_pump_photons", "Intracavity pump photon number.";
    AntiStokes => "anti_stokes_efficiency", "Anti-Stokes sideband efficiency.";
    Stokes => "stokes_efficiency", "Stokes sideband efficiency.";
    AntiStokesPerUw => "anti_stokes_per_uw", "Anti-Stokes efficiency per µW of pump.";
    StokesPerUw => "stokes_per_uw", "Stokes efficiency per µW of pump.";
    SidebandSelectivity => "sideband_selectivity_db", "Anti-Stokes over Stokes efficiency (dB).";
    FreqA => "freq_a_hz", "Lower optical supermode frequency (Hz).";
    FreqB => "freq_b_hz", "Upper optical supermode frequency (Hz).";
    Splitting => "splitting_hz", "Supermode splitting (Hz).";
    MixingAngle => "mixing_angle", "Mixing angle (rad); needs [hybridization].";
    PumpOffset => "pump_offset_hz", "Pump frequency minus mode a (Hz).";
    DetuningA => "detuning_a_hz", "Δ_a (Hz).";
    DetuningB => "detuning_b_hz", "Δ_b (Hz).";
    DetuningC => "detuning_c_hz", "Δ_c (Hz).";
    ThermalOccupancy => "thermal_occupancy", "Thermal occupancy of mode c; needs a temperature.";
    PairRate => "pair_rate", "Pair generation rate (1/s) at the point's cooperativity.";
    Bandwidth => "bandwidth_hz", "3-dB conversion bandwidth (Hz).";
    OffchipEfficiency => "offchip_efficiency", "Low-C efficiency after the nominal output coupler; needs [calibration].";
    CountRate => "count_rate", "Predicted detector counts/s from the low-C efficiency; needs [calibration].";
}

impl Output {
    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL.iter().copied().find(|o| o.name() == name).ok_or_else(|| {
            let valid: Vec<&str> = Self::ALL.iter().map(Output::name).collect();
            Error::Usage(format!("unknown output `{name}`; valid outputs: {}", valid.join(", ")))
        })
    }
}

/// A validated sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepScenario {
    pub setup: Setup,
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub outputs: Vec<Output>,
    pub parallel_threshold: usize,
    /// The scenario as read, echoed into result metadata.
    pub source: Scenario,
}

impl SweepScenario {
    pub fn from_scenario(scenario: &Scenario) -> Result<Self> {
        let spec = scenario
            .sweep
            .as_ref()
            .ok_or_else(|| Error::Usage("scenario has no [sweep] section".into()))?;
        let setup = scenario.setup()?;
        if spec.count < 2 {
            return Err(Error::invalid("sweep.count", format!("must be >= 2, got {}", spec.count)));
        }
        if !(spec.start.is_finite() && spec.stop.is_finite()) {
            return Err(Error::invalid("sweep.start", "range must be finite"));
        }
        if spec.start == spec.stop {
            return Err(Error::invalid("sweep.stop", "must differ from sweep.start"));
        }
        let positive_axis = matches!(
            spec.axis,
            SweepAxis::PumpFrequency | SweepAxis::MicrowaveFrequency | SweepAxis::Temperature
        );
        if positive_axis && spec.start.min(spec.stop) <= 0.0 {
            return Err(Error::invalid("sweep.start", format!("{} values must be > 0", spec.axis.column())));
        }
        if spec.axis == SweepAxis::PumpPower && spec.start.min(spec.stop) < 0.0 {
            return Err(Error::invalid("sweep.start", "pump power must be >= 0"));
        }
        if spec.outputs.is_empty() {
            return Err(Error::Usage("sweep.outputs must name at least one quantity".into()));
        }
        let mut outputs = Vec::with_capacity(spec.outputs.len());
        for name in &spec.outputs {
            let o = Output::parse(name)?;
            if outputs.contains(&o) {
                return Err(Error::Usage(format!("output `{name}` requested twice")));
            }
            outputs.push(o);
        }
        let needs = |missing: bool, what: &str, section: &str| -> Result<()> {
            if missing {
                Err(Error::Usage(format!("{what} needs a {section}")))
            } else {
                Ok(())
            }
        };
        needs(
            spec.axis == SweepAxis::BiasVoltage && setup.hybridization.is_none(),
            "the bias_voltage axis",
            "[hybridization] section",
        )?;
        for o in &outputs {
            let what = format!("output `{}`", o.name());
            match o {
                Output::MixingAngle => needs(setup.hybridization.is_none(), &what, "[hybridization] section")?,
                Output::ThermalOccupancy => needs(
                    spec.axis != SweepAxis::Temperature && setup.temperature.is_none(),
                    &what,
                    "temperature axis or model.temperature",
                )?,
                Output::OffchipEfficiency | Output::CountRate => {
                    needs(setup.calibration.is_none(), &what, "[calibration] section")?
                }
                _ => {}
            }
        }
        Ok(Self {
            setup,
            axis: spec.axis,
            start: spec.start,
            stop: spec.stop,
            count: spec.count,
            outputs,
            parallel_threshold: spec.parallel_threshold,
            source: scenario.clone(),
        })
    }

    /// Axis values, endpoints exact.
    pub fn axis_values(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * (i as f64 / n as f64)
                }
            })
            .collect()
    }

    fn evaluate(&self, x: f64) -> Result<Vec<f64>> {
        let mut s = self.setup.clone();
        let mut theta = None;
        match self.axis {
            SweepAxis::PumpFrequency => s.pump_frequency = Some(angular(x)),
            SweepAxis::MicrowaveFrequency => s.mw_frequency = Some(angular(x)),
            SweepAxis::PumpPower => s.pump_power = x,
            SweepAxis::Temperature => s.temperature = Some(x),
            SweepAxis::BiasVoltage => {
                if let Some((bare, _)) = s.hybridization {
                    s.hybridization = Some((bare, x));
                }
            }
        }
        let mut device = s.device;
        if let Some((bare, bias)) = s.hybridization {
            let m = supermode_frequencies(&bare, bias);
            theta = Some(m.theta);
            if self.axis == SweepAxis::BiasVoltage {
                device = device.with_optical_modes(m.omega_a, m.omega_b)?;
            }
        }
        let pump = PumpDrive::new(s.pump_frequency.unwrap_or(device.omega_a()), s.pump_power)?;
        let mw = MicrowaveDrive::new(s.mw_frequency.unwrap_or(device.omega_c()), s.mw_power)?;
        let op = OperatingPoint::from_drives(&device, pump, mw);
        self.outputs
            .iter()
            .map(|o| point_value(*o, &s, &device, &op, theta))
            .collect()
    }
}

fn per_uw(value: f64, power_w: f64) -> Result<f64> {
    if power_w > 0.0 {
        Ok(value / (power_w * 1e6))
    } else {
        Err(Error::domain("per-µW efficiency undefined at zero pump power"))
    }
}

fn point_value(o: Output, s: &Setup, device: &DeviceParams, op: &OperatingPoint, theta: Option<f64>) -> Result<f64> {
    let sidebands = || {
        sideband_efficiencies(
            device,
            op.pump.omega_p,
            op.pump.power_feed_waveguide,
            &op.microwave,
            s.sideband_weighting(theta),
        )
    };
    let power = op.pump.power_feed_waveguide;
    Ok(match o {
        Output::EfficiencyLowC => efficiency_low_c(device, op),
        Output::EfficiencyFull => efficiency_full(device, op).efficiency,
        Output::EfficiencySteadyState => steady_state_solve(device, op, s.backaction, SolverOptions::default())?
            .efficiency(device, op)
            .unwrap_or(f64::NAN),
        Output::EfficiencyPerUw => per_uw(efficiency_low_c(device, op), power)?,
        Output::Cooperativity => efficiency_full(device, op).cooperativity,
        Output::NPumpPhotons => efficiency_full(device, op).n_pump_photons,
        Output::AntiStokes => sidebands().0,
        Output::Stokes => sidebands().1,
        Output::AntiStokesPerUw => per_uw(sidebands().0, power)?,
        Output::StokesPerUw => per_uw(sidebands().1, power)?,
        Output::SidebandSelectivity => {
            let (up, down) = sidebands();
            10.0 * (up / down).log10()
        }
        Output::FreqA => ordinary(device.omega_a()),
        Output::FreqB => ordinary(device.omega_b()),
        Output::Splitting => ordinary(device.omega_b() - device.omega_a()),
        Output::MixingAngle => theta.unwrap_or(f64::NAN),
        Output::PumpOffset => ordinary(op.pump.omega_p - device.omega_a()),
        Output::DetuningA => ordinary(op.detunings.delta_a),
        Output::DetuningB => ordinary(op.detunings.delta_b),
        Output::DetuningC => ordinary(op.detunings.delta_c),
        Output::ThermalOccupancy => {
            let t = s.temperature.ok_or_else(|| Error::Usage("no temperature given".into()))?;
            thermal_occupancy(ordinary(device.omega_c()), t)?
        }
        Output::PairRate => {
            let c = efficiency_full(device, op).cooperativity;
            pair_generation_rate(c, device.kappa_b_e(), device.kappa_c_e(), device.kappa_b()).rate
        }
        Output::Bandwidth => conversion_bandwidth(device, op)?,
        Output::OffchipEfficiency => {
            let chain = s.calibration.ok_or_else(|| Error::Usage("no calibration".into()))?;
            apply_loss_db(efficiency_low_c(device, op), chain.output_coupler_loss_db())?
        }
        Output::CountRate => {
            let chain = s.calibration.ok_or_else(|| Error::Usage("no calibration".into()))?;
            let reference = FilterCascade::reference();
            let filters = s.filters.as_ref().unwrap_or(&reference);
            snspd_count_rate(efficiency_low_c(device, op), &op.microwave, &chain, filters, &s.detector, 0.0)?
        }
    })
}

/// Tabulated sweep output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub columns: Vec<Column>,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub scenario: Scenario,
    pub toolkit_version: String,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub timestamp_unix: u64,
}

fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0))
}

/// Evaluate every axis point. Points run in parallel when `count` reaches
/// the scenario's threshold, on `threads` workers if given. Row order and
/// values do not depend on either.
pub fn run_sweep(scenario: &SweepScenario, threads: Option<usize>) -> Result<SweepResult> {
    let xs = scenario.axis_values();
    let eval = || -> Vec<Result<Vec<f64>>> {
        if xs.len() >= scenario.parallel_threshold {
            xs.par_iter().map(|&x| scenario.evaluate(x)).collect()
        } else {
            xs.iter().map(|&x| scenario.evaluate(x)).collect()
        }
    };
    let rows = match threads {
        Some(n) => {
            if n == 0 {
                return Err(Error::Usage("thread count must be >= 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?
                .install(eval)
        }
        None => eval(),
    };
    let mut columns: Vec<Column> = std::iter::once(scenario.axis.column())
        .chain(scenario.outputs.iter().map(Output::name))
        .map(|name| Column {
            name: name.to_string(),
            values: Vec::with_capacity(xs.len()),
        })
        .collect();
    for (x, row) in xs.iter().zip(rows) {
        let row = row?;
        columns[0].values.push(*x);
        for (col, v) in columns[1..].iter_mut().zip(row) {
            col.values.push(v);
        }
    }
    Ok(SweepResult {
        columns,
        metadata: Metadata {
            scenario: scenario.source.clone(),
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: timestamp(),
        },
    })
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    /// CSV with a header row and 17-significant-digit floats.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Usage(format!("csv output failed: {e}"));
        out.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(csv_err)?;
        for i in 0..self.rows() {
            out.write_record(self.columns.iter().map(|c| format!("{:.16e}", c.values[i])))
                .map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::Io {
            path: "csv output".into(),
            source: e,
        })
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is ASCII"))
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Usage(format!("json output failed: {e}")))
    }
}
