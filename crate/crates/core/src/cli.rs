//! The `eotx` command line.
//!
//! Every failure prints one line `error[<kind>]: <message>` on stderr.
//! Usage mistakes exit with status 2, everything else with 1.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::constants::{angular, ordinary};
use crate::coupling::{
    g0_overlap_full, g0_overlap_r33, gv_from_g0, read_field_grid, zero_point_voltage, CircuitParams, EoTensor,
    OverlapInputs,
};
use crate::error::{Error, Result};
use crate::measurement::{
    efficiency_decomposition, heterodyne_power, power_at_device, sideband_power_from_rsa, CalibrationChain,
};
use crate::params::{MicrowaveDrive, PumpDrive};
use crate::scenario::{
    fit_g0, optimize_coupling, run_sweep, CouplingBounds, FitRequest, Scenario, SweepScenario,
};
use crate::transduction::{conversion_bandwidth, efficiency_full, efficiency_low_c, selectivity_db, OperatingPoint};
use crate::units::dbm_to_watt;

#[derive(Debug, Parser)]
#[command(name = "eotx", version, about = "Electro-optic transducer design and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate conversion at the scenario's operating point.
    Convert(ConvertArgs),
    /// Run the scenario's [sweep] and write CSV/JSON tables.
    Sweep(SweepArgs),
    /// Infer g0 from a measured per-µW efficiency.
    Fit(FitArgs),
    /// Optimize the extrinsic couplings within the scenario's [optimize] bounds.
    Optimize(ScenarioArg),
    /// Heterodyne, attenuation and coupler-loss arithmetic.
    Calibrate {
        #[command(subcommand)]
        op: CalibrateOp,
    },
    /// Compute g0 from field-grid files.
    Coupling(CouplingArgs),
}

#[derive(Debug, Args)]
struct ScenarioArg {
    #[arg(long, value_name = "PATH")]
    scenario: PathBuf,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// Print JSON instead of aligned text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// Output directory.
    #[arg(long, value_name = "DIR", env = "EOTX_OUT_DIR", default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    format: Format,
    /// Worker threads for parallel evaluation.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// Overrides the scenario's [fit] efficiency_per_uw.
    #[arg(long)]
    efficiency_per_uw: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum CalibrateOp {
    /// P_RSA = G · P_sideband · P_LO, in whichever direction is asked.
    Heterodyne {
        /// LO power (W).
        #[arg(long)]
        lo: f64,
        /// Heterodyne gain (1/W).
        #[arg(long, default_value_t = 1.02e4)]
        gain: f64,
        /// Optical sideband power (W); prints the analyzer power.
        #[arg(long, conflicts_with = "rsa", required_unless_present = "rsa")]
        sideband: Option<f64>,
        /// Analyzer power (W); prints the sideband power.
        #[arg(long)]
        rsa: Option<f64>,
    },
    /// Microwave power at the device.
    Attenuate {
        /// Generator power (dBm).
        #[arg(long, allow_hyphen_values = true)]
        generator_dbm: f64,
        #[arg(long, default_value_t = 13.0)]
        attenuation_db: f64,
    },
    /// Refer an off-chip efficiency to the chip with its split uncertainty.
    Decompose {
        #[arg(long)]
        offchip: f64,
        #[arg(long, default_value_t = 24.4)]
        total_loss_db: f64,
        #[arg(long, default_value_t = 3.3)]
        split_uncertainty_db: f64,
    },
}

#[derive(Debug, Args)]
struct CouplingArgs {
    #[arg(long, value_name = "PATH")]
    field_a: PathBuf,
    #[arg(long, value_name = "PATH")]
    field_b: PathBuf,
    #[arg(long, value_name = "PATH")]
    field_c: PathBuf,
    /// Mode frequencies (Hz).
    #[arg(long)]
    freq_a: f64,
    #[arg(long)]
    freq_b: f64,
    #[arg(long)]
    freq_c: f64,
    /// r33 (m/V).
    #[arg(long, default_value_t = 31e-12)]
    r33: f64,
    /// Use the z-only form with this extraordinary index instead of the
    /// full tensor form with the grid permittivities.
    #[arg(long)]
    n_e: Option<f64>,
    /// Resonator impedance (Ω); also reports V_zp and the implied g_V.
    #[arg(long)]
    impedance: Option<f64>,
}

/// Run the CLI on `args` (including the program name), writing to the
/// given streams. Returns the process exit status.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error[{}]: {msg}", e.kind());
            match e {
                Error::Usage(_) | Error::GridMismatch(_) => 2,
                _ => 1,
            }
        }
    }
}

/// Run with the process arguments and standard streams.
pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

fn print_kv(out: &mut dyn Write, rows: &[(&str, String)]) -> Result<()> {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        writeln!(out, "{k:<width$}  {v}").map_err(stdout_err)?;
    }
    Ok(())
}

fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

#[derive(Serialize)]
struct ConvertReport {
    scenario: String,
    pump_power_w: f64,
    microwave_power_w: f64,
    efficiency_low_c: f64,
    efficiency_full: f64,
    cooperativity: f64,
    n_pump_photons: f64,
    efficiency_per_uw: Option<f64>,
    cooperativity_per_uw: Option<f64>,
    n_pump_photons_per_uw: Option<f64>,
    bandwidth_hz: f64,
    selectivity_db: f64,
}

fn scenario_name(s: &Scenario, path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    s.name_or(stem).to_string()
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Convert(args) => {
            let path = &args.scenario.scenario;
            let scenario = Scenario::from_path(path)?;
            let setup = scenario.setup()?;
            let p = setup.device;
            let pump = PumpDrive::new(setup.pump_frequency.unwrap_or(p.omega_a()), setup.pump_power)?;
            let mw = MicrowaveDrive::new(setup.mw_frequency.unwrap_or(p.omega_c()), setup.mw_power)?;
            let op = OperatingPoint::from_drives(&p, pump, mw);
            let full = efficiency_full(&p, &op);
            let low = efficiency_low_c(&p, &op);
            let per = |x: f64| (setup.pump_power > 0.0).then(|| x / (setup.pump_power * 1e6));
            let bandwidth = conversion_bandwidth(&p, &op)?;
            let report = ConvertReport {
                scenario: scenario_name(&scenario, path),
                pump_power_w: setup.pump_power,
                microwave_power_w: setup.mw_power,
                efficiency_low_c: low,
                efficiency_full: full.efficiency,
                cooperativity: full.cooperativity,
                n_pump_photons: full.n_pump_photons,
                efficiency_per_uw: per(low),
                cooperativity_per_uw: per(full.cooperativity),
                n_pump_photons_per_uw: per(full.n_pump_photons),
                bandwidth_hz: bandwidth,
                selectivity_db: selectivity_db(&p, setup.sideband_weighting(None)),
            };
            if args.json {
                let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Usage(e.to_string()))?;
                writeln!(out, "{text}").map_err(stdout_err)?;
                return Ok(());
            }
            let opt = |x: Option<f64>| x.map_or("n/a".to_string(), sci);
            print_kv(
                out,
                &[
                    ("scenario", report.scenario.clone()),
                    ("pump_power_w", sci(report.pump_power_w)),
                    ("efficiency_low_c", sci(report.efficiency_low_c)),
                    ("efficiency_full", sci(report.efficiency_full)),
                    ("efficiency_per_uw", opt(report.efficiency_per_uw)),
                    ("cooperativity", sci(report.cooperativity)),
                    ("cooperativity_per_uw", opt(report.cooperativity_per_uw)),
                    ("n_pump_photons", sci(report.n_pump_photons)),
                    ("n_pump_photons_per_uw", opt(report.n_pump_photons_per_uw)),
                    ("bandwidth_hz", sci(report.bandwidth_hz)),
                    ("selectivity_db", format!("{:.3}", report.selectivity_db)),
                ],
            )
        }
        Command::Sweep(args) => {
            let path = &args.scenario.scenario;
            let scenario = Scenario::from_path(path)?;
            let sweep = SweepScenario::from_scenario(&scenario)?;
            let result = run_sweep(&sweep, args.threads)?;
            std::fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
            let name = scenario_name(&scenario, path);
            if matches!(args.format, Format::Csv | Format::Both) {
                let file = args.out.join(format!("{name}.csv"));
                std::fs::write(&file, result.to_csv_string()?).map_err(io_err(&file))?;
                writeln!(out, "{}", file.display()).map_err(stdout_err)?;
            }
            if matches!(args.format, Format::Json | Format::Both) {
                let file = args.out.join(format!("{name}.json"));
                std::fs::write(&file, result.to_json_string()? + "\n").map_err(io_err(&file))?;
                writeln!(out, "{}", file.display()).map_err(stdout_err)?;
            }
            Ok(())
        }
        Command::Fit(args) => {
            let scenario = Scenario::from_path(&args.scenario.scenario)?;
            let setup = scenario.setup()?;
            let per_uw = match (args.efficiency_per_uw, scenario.fit) {
                (Some(x), _) => x,
                (None, Some(f)) => f.efficiency_per_uw,
                (None, None) => {
                    return Err(Error::Usage(
                        "give --efficiency-per-uw or a [fit] section in the scenario".into(),
                    ))
                }
            };
            let g0 = fit_g0(&FitRequest {
                measured_efficiency_per_watt: per_uw * 1e6,
                device: setup.device,
            })?;
            print_kv(
                out,
                &[
                    ("efficiency_per_uw", sci(per_uw)),
                    ("g0_hz", sci(ordinary(g0))),
                    ("scenario_g0_hz", sci(ordinary(setup.device.g0()))),
                ],
            )
        }
        Command::Optimize(args) => {
            let scenario = Scenario::from_path(&args.scenario)?;
            let setup = scenario.setup()?;
            let spec = scenario
                .optimize
                .ok_or_else(|| Error::Usage("scenario has no [optimize] section".into()))?;
            let bounds = CouplingBounds {
                kappa_b_e: (angular(spec.kappa_b_e[0]), angular(spec.kappa_b_e[1])),
                kappa_c_e: (angular(spec.kappa_c_e[0]), angular(spec.kappa_c_e[1])),
            };
            let o = optimize_coupling(&setup.device, setup.pump_power, &bounds)?;
            let current = efficiency_low_c(&setup.device, &OperatingPoint::resonant(&setup.device, setup.pump_power, 0.0)?);
            print_kv(
                out,
                &[
                    ("kappa_b_e_hz", sci(ordinary(o.kappa_b_e))),
                    ("kappa_c_e_hz", sci(ordinary(o.kappa_c_e))),
                    ("efficiency", sci(o.efficiency)),
                    ("efficiency_per_uw", sci(o.efficiency / (setup.pump_power * 1e6))),
                    ("gain_over_scenario", format!("{:.4}", o.efficiency / current)),
                    ("at_boundary", o.at_boundary.to_string()),
                    ("cycles", o.cycles.to_string()),
                ],
            )
        }
        Command::Calibrate { op } => match op {
            CalibrateOp::Heterodyne { lo, gain, sideband, rsa } => {
                if !(gain > 0.0 && lo > 0.0) {
                    return Err(Error::domain("LO power and gain must be > 0"));
                }
                match (sideband, rsa) {
                    (Some(s), _) => print_kv(out, &[("rsa_power_w", sci(heterodyne_power(s, lo, gain)))]),
                    (None, Some(r)) => {
                        print_kv(out, &[("sideband_power_w", sci(sideband_power_from_rsa(r, lo, gain)?))])
                    }
                    (None, None) => Err(Error::Usage("give --sideband or --rsa".into())),
                }
            }
            CalibrateOp::Attenuate {
                generator_dbm,
                attenuation_db,
            } => {
                let chain = CalibrationChain {
                    mw_attenuation_db: attenuation_db,
                    ..CalibrationChain::reference()
                };
                chain.validate()?;
                let p = power_at_device(dbm_to_watt(generator_dbm)?, &chain)?;
                print_kv(
                    out,
                    &[
                        ("power_at_device_w", sci(p)),
                        ("power_at_device_dbm", format!("{:.3}", generator_dbm - attenuation_db)),
                    ],
                )
            }
            CalibrateOp::Decompose {
                offchip,
                total_loss_db,
                split_uncertainty_db,
            } => {
                let chain = CalibrationChain {
                    grating_total_loss_db: total_loss_db,
                    grating_split_uncertainty_db: split_uncertainty_db,
                    ..CalibrationChain::reference()
                };
                let b = efficiency_decomposition(offchip, &chain)?;
                print_kv(
                    out,
                    &[
                        ("onchip_nominal", sci(b.nominal)),
                        ("onchip_low", sci(b.low)),
                        ("onchip_high", sci(b.high)),
                    ],
                )
            }
        },
        Command::Coupling(args) => {
            let a = read_field_grid(&args.field_a)?;
            let b = read_field_grid(&args.field_b)?;
            let c = read_field_grid(&args.field_c)?;
            for (name, f) in [("freq-a", args.freq_a), ("freq-b", args.freq_b), ("freq-c", args.freq_c)] {
                if !(f.is_finite() && f > 0.0) {
                    return Err(Error::invalid(name, format!("must be > 0, got {f}")));
                }
            }
            let inputs = OverlapInputs {
                a: &a,
                b: &b,
                c: &c,
                omega_a: angular(args.freq_a),
                omega_b: angular(args.freq_b),
                omega_c: angular(args.freq_c),
            };
            let g = match args.n_e {
                Some(n) => g0_overlap_r33(&inputs, n, args.r33)?,
                None => g0_overlap_full(&inputs, &EoTensor::r33_only(args.r33))?,
            };
            let mut rows = vec![("g0_hz", sci(ordinary(g.magnitude))), ("g0_phase_rad", format!("{:.6}", g.phase))];
            if let Some(z) = args.impedance {
                let circuit = CircuitParams::from_impedance(z, angular(args.freq_c))?;
                let v = zero_point_voltage(&circuit);
                rows.push(("c_total_f", sci(circuit.c_total)));
                rows.push(("v_zp_v", sci(v)));
                rows.push(("g_v_hz_per_v", sci(ordinary(gv_from_g0(g.magnitude, v)))));
            }
            print_kv(out, &rows)
        }
    }
}
