//! Frequency, wavelength and power-unit conversions.

use crate::constants::{PLANCK, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite and > 0, got {value}")))
    }
}

/// Vacuum wavelength (m) of light at `freq_hz`.
pub fn wavelength_from_frequency(freq_hz: f64) -> Result<f64> {
    require_positive("frequency", freq_hz)?;
    Ok(SPEED_OF_LIGHT / freq_hz)
}

/// Frequency (Hz) of light with vacuum wavelength `wavelength_m`.
pub fn frequency_from_wavelength(wavelength_m: f64) -> Result<f64> {
    require_positive("wavelength", wavelength_m)?;
    Ok(SPEED_OF_LIGHT / wavelength_m)
}

/// First-order wavelength span Δλ = λ²Δf/c corresponding to a frequency
/// span `delta_hz` around `center_hz`.
pub fn detuning_to_wavelength_span(center_hz: f64, delta_hz: f64) -> Result<f64> {
    let lambda = wavelength_from_frequency(center_hz)?;
    if !delta_hz.is_finite() {
        return Err(Error::domain("frequency span must be finite"));
    }
    Ok(lambda * lambda * delta_hz / SPEED_OF_LIGHT)
}

/// Inverse of [`detuning_to_wavelength_span`].
pub fn wavelength_span_to_detuning(center_hz: f64, span_m: f64) -> Result<f64> {
    let lambda = wavelength_from_frequency(center_hz)?;
    if !span_m.is_finite() {
        return Err(Error::domain("wavelength span must be finite"));
    }
    Ok(span_m * SPEED_OF_LIGHT / (lambda * lambda))
}

pub fn dbm_to_watt(dbm: f64) -> Result<f64> {
    if !dbm.is_finite() {
        return Err(Error::domain("dBm value must be finite"));
    }
    Ok(10f64.powf((dbm - 30.0) / 10.0))
}

pub fn watt_to_dbm(watt: f64) -> Result<f64> {
    require_positive("power", watt)?;
    Ok(10.0 * watt.log10() + 30.0)
}

pub fn db_to_ratio(db: f64) -> Result<f64> {
    if !db.is_finite() {
        return Err(Error::domain("dB value must be finite"));
    }
    Ok(10f64.powf(db / 10.0))
}

pub fn ratio_to_db(ratio: f64) -> Result<f64> {
    require_positive("power ratio", ratio)?;
    Ok(10.0 * ratio.log10())
}

/// Power remaining after a loss of `loss_db` (positive = attenuation).
pub fn apply_loss_db(power_w: f64, loss_db: f64) -> Result<f64> {
    Ok(power_w * db_to_ratio(-loss_db)?)
}

/// Photon flux (1/s) of a beam of `power_w` at ordinary frequency `freq_hz`.
pub fn photon_flux(power_w: f64, freq_hz: f64) -> Result<f64> {
    require_positive("frequency", freq_hz)?;
    if !(power_w.is_finite() && power_w >= 0.0) {
        return Err(Error::domain(format!("power must be finite and >= 0, got {power_w}")));
    }
    Ok(power_w / (PLANCK * freq_hz))
}
