//! Steady-state coupled-mode conversion physics.
//!
//! The pump drives optical mode `a`, the microwave drive populates mode `c`,
//! and the three-wave interaction `g0 (a b† c + h.c.)` scatters into optical
//! mode `b`. Efficiencies are on-chip photon-number efficiencies
//! `κ_{b,e}|b|² / (|ε_µ|²/κ_{c,e})`.
//!
//! Pump photon fluxes are taken at the pump frequency, `P_p/ħω_p`, in every
//! formula here and in the mean-field solver, so the closed forms and the
//! solver agree to rounding when the pump is detuned.

mod sideband;
mod solver;

pub use sideband::{
    selectivity_db, sideband_efficiencies, sideband_spectrum, single_resonance_penalty_db,
    single_resonance_penalty_sideband_db, SidebandPoint, SidebandWeighting,
};
pub use solver::{steady_state_solve, Backaction, SolverOptions, SteadyStateSolution};

use serde::Serialize;

use crate::constants::{ordinary, BOLTZMANN, PLANCK, TWO_PI};
use crate::error::{Error, Result};
use crate::params::{DeviceParams, MicrowaveDrive, ModeLoss, PumpDrive};

/// Detunings Δ_a = ω_a − ω_p, Δ_b = ω_b − ω_p − ω_µ, Δ_c = ω_c − ω_µ (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DetuningSet {
    pub delta_a: f64,
    pub delta_b: f64,
    pub delta_c: f64,
}

impl DetuningSet {
    pub fn from_drives(params: &DeviceParams, pump: &PumpDrive, mw: &MicrowaveDrive) -> Self {
        Self {
            delta_a: params.omega_a() - pump.omega_p,
            delta_b: params.omega_b() - pump.omega_p - mw.omega_mu,
            delta_c: params.omega_c() - mw.omega_mu,
        }
    }
}

/// Drives plus the detunings at which formulas are evaluated.
///
/// [`OperatingPoint::from_drives`] derives the detunings from the drive
/// frequencies. [`OperatingPoint::resonant`] pins all three detunings to zero,
/// the ideal operating point where ω_b = ω_a + ω_c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub detunings: DetuningSet,
    pub pump: PumpDrive,
    pub microwave: MicrowaveDrive,
}

impl OperatingPoint {
    pub fn from_drives(params: &DeviceParams, pump: PumpDrive, microwave: MicrowaveDrive) -> Self {
        Self {
            detunings: DetuningSet::from_drives(params, &pump, &microwave),
            pump,
            microwave,
        }
    }

    /// Pump on mode a, microwave on mode c, all detunings zero.
    pub fn resonant(params: &DeviceParams, pump_power_w: f64, mw_power_w: f64) -> Result<Self> {
        Ok(Self {
            detunings: DetuningSet::default(),
            pump: PumpDrive::new(params.omega_a(), pump_power_w)?,
            microwave: MicrowaveDrive::new(params.omega_c(), mw_power_w)?,
        })
    }

    pub fn with_detunings(mut self, detunings: DetuningSet) -> Self {
        self.detunings = detunings;
        self
    }

    pub fn with_pump_power(mut self, power_w: f64) -> Result<Self> {
        self.pump = PumpDrive::new(self.pump.omega_p, power_w)?;
        Ok(self)
    }
}

/// Result of the full efficiency evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConversionResult {
    pub efficiency: f64,
    pub cooperativity: f64,
    pub big_g_squared: f64,
    pub n_pump_photons: f64,
}

/// Mean intracavity pump photon number n_a = κ_{a,e}/(Δ_a² + (κ_a/2)²) · P_p/ħω_p.
pub fn intracavity_pump_photons(params: &DeviceParams, op: &OperatingPoint) -> f64 {
    params.loss_a().lorentzian(op.detunings.delta_a) * op.pump.photon_flux()
}

/// C = 4 g0² n_a / (κ_b κ_c).
pub fn cooperativity(g0: f64, n_a: f64, kappa_b: f64, kappa_c: f64) -> f64 {
    4.0 * g0 * g0 * n_a / (kappa_b * kappa_c)
}

/// Full steady-state efficiency, including the conversion backaction
/// denominator `|1 + G²/(D_b D_c)|²` with `D_m = −iΔ_m − κ_m/2`.
pub fn efficiency_full(params: &DeviceParams, op: &OperatingPoint) -> ConversionResult {
    let n_a = intracavity_pump_photons(params, op);
    let g0 = params.g0();
    let g2 = g0 * g0 * n_a;
    let d = &op.detunings;
    // D_b D_c = (−iΔ_b − κ_b/2)(−iΔ_c − κ_c/2)
    let (hb, hc) = (0.5 * params.kappa_b(), 0.5 * params.kappa_c());
    let re = hb * hc - d.delta_b * d.delta_c;
    let im = d.delta_b * hc + d.delta_c * hb;
    // |D_b D_c + G²|² = |D_b D_c|² |1 + G²/(D_b D_c)|²
    let shifted = (re + g2) * (re + g2) + im * im;
    let efficiency = params.kappa_b_e() * params.kappa_c_e() * g2 / shifted;
    ConversionResult {
        efficiency,
        cooperativity: cooperativity(g0, n_a, params.kappa_b(), params.kappa_c()),
        big_g_squared: g2,
        n_pump_photons: n_a,
    }
}

/// Low-cooperativity efficiency: product of three port-weighted Lorentzians
/// times g0² and the pump photon flux. Linear in pump power.
pub fn efficiency_low_c(params: &DeviceParams, op: &OperatingPoint) -> f64 {
    let d = &op.detunings;
    low_c_product(
        params.g0(),
        op.pump.photon_flux(),
        (params.loss_a(), d.delta_a),
        (params.loss_b(), d.delta_b),
        (params.loss_c(), d.delta_c),
    )
}

/// The low-cooperativity product in terms of explicit mode losses.
pub fn low_c_product(
    g0: f64,
    pump_flux: f64,
    a: (ModeLoss, f64),
    b: (ModeLoss, f64),
    c: (ModeLoss, f64),
) -> f64 {
    g0 * g0 * a.0.lorentzian(a.1) * b.0.lorentzian(b.1) * c.0.lorentzian(c.1) * pump_flux
}

/// Zero-detuning efficiency 4C/(1+C)² times the extraction ceiling.
pub fn efficiency_from_cooperativity(c: f64, params: &DeviceParams) -> f64 {
    4.0 * c / ((1.0 + c) * (1.0 + c)) * params.extraction_ceiling()
}

/// Cooperativity implied by a zero-detuning efficiency in the low-C limit.
pub fn cooperativity_from_efficiency(eta: f64, params: &DeviceParams) -> f64 {
    eta / (4.0 * params.extraction_ceiling())
}

/// Microwave port convention for [`efficiency_critical_coupling`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MicrowaveCoupling {
    /// Two ports of rate κ_{c,e}: critical means 2κ_{c,e} = κ_{c,i}.
    #[default]
    DoubleSided,
    /// One port: critical means κ_{c,e} = κ_{c,i}.
    SingleSided,
}

/// Intrinsic loss rates, used when the extrinsic rates are set to critical coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntrinsicRates {
    pub kappa_a_i: f64,
    pub kappa_b_i: f64,
    pub kappa_c_i: f64,
}

impl IntrinsicRates {
    pub fn of(params: &DeviceParams) -> Self {
        Self {
            kappa_a_i: params.kappa_a_i(),
            kappa_b_i: params.kappa_b_i(),
            kappa_c_i: params.kappa_c_i(),
        }
    }
}

/// Resonant low-C efficiency with every mode critically coupled
/// (κ_m = 2κ_{m,i}).
///
/// Substituting κ_{m,e} = κ_{m,i} into each optical Lorentzian gives 1/κ_{m,i}.
/// With a double-sided microwave resonator, κ_c = 2κ_{c,i} requires
/// κ_{c,e} = κ_{c,i}/2 and the microwave factor becomes 1/(2κ_{c,i}), so
/// `η = g0² / (2 κ_{a,i} κ_{b,i} κ_{c,i}) · P_p/ħω_p`. A single-sided
/// microwave port gives prefactor 1 instead of 1/2.
pub fn efficiency_critical_coupling(
    g0: f64,
    intrinsic: IntrinsicRates,
    pump: &PumpDrive,
    coupling: MicrowaveCoupling,
) -> Result<f64> {
    for (field, v) in [
        ("kappa_a_i", intrinsic.kappa_a_i),
        ("kappa_b_i", intrinsic.kappa_b_i),
        ("kappa_c_i", intrinsic.kappa_c_i),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(field, format!("must be > 0, got {v}")));
        }
    }
    let prefactor = match coupling {
        MicrowaveCoupling::DoubleSided => 0.5,
        MicrowaveCoupling::SingleSided => 1.0,
    };
    Ok(prefactor * g0 * g0 / (intrinsic.kappa_a_i * intrinsic.kappa_b_i * intrinsic.kappa_c_i)
        * pump.photon_flux())
}

/// Entangled-pair generation with the pump on mode b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairRate {
    /// Pairs per second.
    pub rate: f64,
    /// Set when C ≥ 0.1, where the linear rate formula stops being reliable.
    pub outside_low_cooperativity: bool,
}

/// R = 4C κ_{b,e} κ_{c,e} / κ_b (rates in rad/s give pairs per second).
pub fn pair_generation_rate(c: f64, kappa_b_e: f64, kappa_c_e: f64, kappa_b: f64) -> PairRate {
    PairRate {
        rate: 4.0 * c * kappa_b_e * kappa_c_e / kappa_b,
        outside_low_cooperativity: c >= 0.1,
    }
}

/// Bose–Einstein occupation of a mode at `freq_hz` and temperature `temp_k`.
pub fn thermal_occupancy(freq_hz: f64, temp_k: f64) -> Result<f64> {
    if !(temp_k.is_finite() && temp_k > 0.0) {
        return Err(Error::domain(format!("temperature must be > 0 K, got {temp_k}")));
    }
    if !(freq_hz.is_finite() && freq_hz > 0.0) {
        return Err(Error::domain(format!("frequency must be > 0, got {freq_hz}")));
    }
    let x = PLANCK * freq_hz / (BOLTZMANN * temp_k);
    Ok(1.0 / x.exp_m1())
}

/// Intracavity pump enhancement of a resonant pump over one detuned by
/// `omega_mu` from a single resonance of linewidth `kappa_opt`: 4ω_µ²/κ².
pub fn resonant_pump_advantage(omega_mu: f64, kappa_opt: f64) -> Result<f64> {
    if !(omega_mu > 0.0 && kappa_opt > 0.0) {
        return Err(Error::domain("microwave frequency and optical linewidth must be > 0"));
    }
    Ok(4.0 * omega_mu * omega_mu / (kappa_opt * kappa_opt))
}

/// Bisection resolution of [`conversion_bandwidth`], in Hz.
pub const BANDWIDTH_RESOLUTION_HZ: f64 = 1.0e3;

/// 3-dB conversion bandwidth (Hz): the full width at half maximum of the
/// low-C efficiency versus microwave detuning, with pump and optical
/// detunings held at zero.
pub fn conversion_bandwidth(params: &DeviceParams, op: &OperatingPoint) -> Result<f64> {
    let at = |delta_c: f64| {
        let o = op.with_detunings(DetuningSet {
            delta_a: 0.0,
            delta_b: 0.0,
            delta_c,
        });
        efficiency_low_c(params, &o)
    };
    let peak = at(0.0);
    if peak.is_nan() || peak <= 0.0 {
        return Err(Error::domain("efficiency is zero at the operating point; bandwidth undefined"));
    }
    let half = 0.5 * peak;
    let mut hi = params.kappa_c();
    while at(hi) > half {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::domain("no half-maximum crossing found"));
        }
    }
    let mut lo = 0.0;
    // the response is even in Δ_c, so FWHM = 2 × half-width
    let tol = 0.5 * BANDWIDTH_RESOLUTION_HZ * TWO_PI;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if at(mid) > half {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ordinary(lo + hi))
}
