//! Calibration arithmetic for the heterodyne and photon-counting setups.
//!
//! Losses are positive dB figures. The grating-coupler pair is characterized
//! only by its combined insertion loss, so on-chip quantities assume an even
//! split between the input and output coupler, with a symmetric uncertainty
//! band of `grating_split_uncertainty_db` on the output side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::MicrowaveDrive;
use crate::units::{apply_loss_db, db_to_ratio};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationChain {
    /// Heterodyne gain G in P_RSA = G · P_sideband · P_LO (1/W).
    pub heterodyne_gain: f64,
    /// Attenuation between the microwave generator and the device (dB).
    pub mw_attenuation_db: f64,
    /// Combined insertion loss of both grating couplers (dB).
    pub grating_total_loss_db: f64,
    /// Uncertainty of the per-coupler split (± dB).
    pub grating_split_uncertainty_db: f64,
    /// Optical loss after the output coupler, before detection (dB).
    pub downstream_optical_loss_db: f64,
}

impl CalibrationChain {
    pub fn new(
        heterodyne_gain: f64,
        mw_attenuation_db: f64,
        grating_total_loss_db: f64,
        grating_split_uncertainty_db: f64,
        downstream_optical_loss_db: f64,
    ) -> Result<Self> {
        let chain = Self {
            heterodyne_gain,
            mw_attenuation_db,
            grating_total_loss_db,
            grating_split_uncertainty_db,
            downstream_optical_loss_db,
        };
        chain.validate()?;
        Ok(chain)
    }

    /// The measured chain: G = 1.02e4 /W, 13 dB microwave attenuation,
    /// 24.4 dB through both couplers with ±3.3 dB split uncertainty.
    pub fn reference() -> Self {
        Self {
            heterodyne_gain: 1.02e4,
            mw_attenuation_db: 13.0,
            grating_total_loss_db: 24.4,
            grating_split_uncertainty_db: 3.3,
            downstream_optical_loss_db: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.heterodyne_gain.is_finite() && self.heterodyne_gain > 0.0) {
            return Err(Error::invalid("heterodyne_gain", format!("must be > 0, got {}", self.heterodyne_gain)));
        }
        for (field, v) in [
            ("mw_attenuation_db", self.mw_attenuation_db),
            ("grating_total_loss_db", self.grating_total_loss_db),
            ("grating_split_uncertainty_db", self.grating_split_uncertainty_db),
            ("downstream_optical_loss_db", self.downstream_optical_loss_db),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(field, format!("loss must be >= 0 dB, got {v}")));
            }
        }
        if self.grating_split_uncertainty_db > self.grating_total_loss_db / 2.0 {
            return Err(Error::invalid(
                "grating_split_uncertainty_db",
                "cannot exceed half the total coupler loss",
            ));
        }
        Ok(())
    }

    /// Nominal output-coupler loss, half the combined loss.
    pub fn output_coupler_loss_db(&self) -> f64 {
        self.grating_total_loss_db / 2.0
    }
}

/// Power at the spectrum analyzer for a given sideband and LO power.
pub fn heterodyne_power(p_sideband: f64, p_lo: f64, gain: f64) -> f64 {
    gain * p_sideband * p_lo
}

/// Invert the heterodyne relation for the optical sideband power.
pub fn sideband_power_from_rsa(p_mw_at_rsa: f64, p_lo: f64, gain: f64) -> Result<f64> {
    if !(p_lo.is_finite() && p_lo > 0.0) {
        return Err(Error::domain(format!("LO power must be > 0, got {p_lo}")));
    }
    if !(gain.is_finite() && gain > 0.0) {
        return Err(Error::domain(format!("heterodyne gain must be > 0, got {gain}")));
    }
    Ok(p_mw_at_rsa / (gain * p_lo))
}

/// Microwave power reaching the device from the generator.
pub fn power_at_device(p_generator: f64, chain: &CalibrationChain) -> Result<f64> {
    apply_loss_db(p_generator, chain.mw_attenuation_db)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyBounds {
    pub nominal: f64,
    /// Output coupler loss below nominal by the split uncertainty.
    pub low: f64,
    /// Output coupler loss above nominal by the split uncertainty.
    pub high: f64,
}

/// Refer an off-chip efficiency back to the chip by undoing the output
/// coupler loss: nominal split, then ∓ the split uncertainty.
pub fn efficiency_decomposition(eta_offchip: f64, chain: &CalibrationChain) -> Result<EfficiencyBounds> {
    if !(eta_offchip.is_finite() && eta_offchip > 0.0) {
        return Err(Error::domain(format!("efficiency must be > 0, got {eta_offchip}")));
    }
    chain.validate()?;
    let out = chain.output_coupler_loss_db();
    let u = chain.grating_split_uncertainty_db;
    Ok(EfficiencyBounds {
        nominal: eta_offchip * db_to_ratio(out)?,
        low: eta_offchip * db_to_ratio(out - u)?,
        high: eta_offchip * db_to_ratio(out + u)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterStage {
    pub fwhm_hz: f64,
    /// Stage center relative to the nominal filter frequency (Hz).
    #[serde(default)]
    pub center_offset_hz: f64,
}

/// Cascaded Lorentzian filters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterCascade {
    pub stages: Vec<FilterStage>,
}

/// Per-stage width that gives the two-stage cascade a 30 MHz combined width.
pub const REFERENCE_STAGE_FWHM_HZ: f64 = 46.6e6;

impl FilterCascade {
    pub fn new(stages: Vec<FilterStage>) -> Result<Self> {
        let c = Self { stages };
        c.validate()?;
        Ok(c)
    }

    /// Two identical centered stages of 46.6 MHz.
    pub fn reference() -> Self {
        let stage = FilterStage {
            fwhm_hz: REFERENCE_STAGE_FWHM_HZ,
            center_offset_hz: 0.0,
        };
        Self {
            stages: vec![stage; 2],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (n, s) in self.stages.iter().enumerate() {
            if !(s.fwhm_hz.is_finite() && s.fwhm_hz > 0.0) {
                return Err(Error::invalid(format!("stages[{n}].fwhm_hz"), format!("must be > 0, got {}", s.fwhm_hz)));
            }
            if !s.center_offset_hz.is_finite() {
                return Err(Error::invalid(format!("stages[{n}].center_offset_hz"), "must be finite"));
            }
        }
        Ok(())
    }

    /// Linear power transmission at `detuning_hz` from the nominal center.
    pub fn transmission(&self, detuning_hz: f64) -> f64 {
        self.stages
            .iter()
            .map(|s| {
                let x = 2.0 * (detuning_hz - s.center_offset_hz) / s.fwhm_hz;
                1.0 / (1.0 + x * x)
            })
            .product()
    }

    /// Full width at half of the peak transmission, for centered stages.
    pub fn combined_fwhm_hz(&self) -> f64 {
        let half = 0.5 * self.transmission(0.0);
        let mut lo = 0.0;
        let mut hi = self.stages.iter().map(|s| s.fwhm_hz).fold(0.0, f64::max);
        while self.transmission(hi) > half {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.transmission(mid) > half {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-9 * hi {
                break;
            }
        }
        lo + hi
    }
}

/// Cascade transmission in dB (≤ 0).
pub fn filter_transmission(cascade: &FilterCascade, detuning_hz: f64) -> f64 {
    10.0 * cascade.transmission(detuning_hz).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorModel {
    pub quantum_efficiency: f64,
    /// Counts/s with no signal.
    pub background_rate: f64,
}

impl Default for DetectorModel {
    /// Unit efficiency, so predicted signal rates are upper bounds, and the
    /// measured 4.8 kHz background.
    fn default() -> Self {
        Self {
            quantum_efficiency: 1.0,
            background_rate: 4.8e3,
        }
    }
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.quantum_efficiency) {
            return Err(Error::invalid(
                "quantum_efficiency",
                format!("must lie in [0, 1], got {}", self.quantum_efficiency),
            ));
        }
        if !(self.background_rate.is_finite() && self.background_rate >= 0.0) {
            return Err(Error::invalid("background_rate", format!("must be >= 0, got {}", self.background_rate)));
        }
        Ok(())
    }
}

/// Predicted detector count rate (1/s) for microwave photons converted on
/// chip with efficiency `eta_onchip` and passed through the output coupler,
/// downstream optics, filters detuned by `filter_detuning_hz`, and detector.
pub fn snspd_count_rate(
    eta_onchip: f64,
    mw: &MicrowaveDrive,
    chain: &CalibrationChain,
    cascade: &FilterCascade,
    detector: &DetectorModel,
    filter_detuning_hz: f64,
) -> Result<f64> {
    if !(eta_onchip.is_finite() && eta_onchip >= 0.0) {
        return Err(Error::domain(format!("efficiency must be >= 0, got {eta_onchip}")));
    }
    chain.validate()?;
    cascade.validate()?;
    detector.validate()?;
    let path_loss = chain.output_coupler_loss_db() + chain.downstream_optical_loss_db;
    let at_filter = apply_loss_db(eta_onchip * mw.photon_flux(), path_loss)?;
    Ok(at_filter * cascade.transmission(filter_detuning_hz) * detector.quantum_efficiency + detector.background_rate)
}

/// Free spectral range v/(2d) of bulk acoustic standing waves (Hz).
pub fn acoustic_fsr(shear_velocity: f64, substrate_thickness: f64) -> Result<f64> {
    for (name, v) in [("shear velocity", shear_velocity), ("substrate thickness", substrate_thickness)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!("{name} must be > 0, got {v}")));
        }
    }
    Ok(shear_velocity / (2.0 * substrate_thickness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::angular;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn heterodyne_example() {
        let p = heterodyne_power(3.4e-6, 390e-6, 1.02e4);
        assert_relative_eq!(p, 13.5e-6, max_relative = 0.005);
        assert_relative_eq!(sideband_power_from_rsa(p, 390e-6, 1.02e4).unwrap(), 3.4e-6, max_relative = 1e-12);
        assert_eq!(sideband_power_from_rsa(0.0, 390e-6, 1.02e4).unwrap(), 0.0);
        assert!(sideband_power_from_rsa(1.0, 0.0, 1.02e4).is_err());
    }

    #[test]
    fn attenuation_budget() {
        let chain = CalibrationChain::reference();
        assert_relative_eq!(power_at_device(1e-3, &chain).unwrap(), 50.12e-6, max_relative = 1e-3);
        let none = CalibrationChain {
            mw_attenuation_db: 0.0,
            ..chain
        };
        assert_eq!(power_at_device(2.5e-3, &none).unwrap(), 2.5e-3);
    }

    #[test]
    fn on_chip_decomposition() {
        let b = efficiency_decomposition(3.9e-7, &CalibrationChain::reference()).unwrap();
        // 12.2 dB out-coupler: 3.9e-7 · 10^1.22
        assert_relative_eq!(b.nominal, 3.9e-7 * 16.595_869_074_375_6, max_relative = 1e-12);
        assert_relative_eq!(b.high / b.nominal, 10f64.powf(0.33), max_relative = 1e-12);
        assert_relative_eq!(b.nominal / b.low, 10f64.powf(0.33), max_relative = 1e-12);
        assert!(b.low < 6.6e-6 && 6.6e-6 < b.high);
        let lossless = CalibrationChain {
            grating_total_loss_db: 0.0,
            grating_split_uncertainty_db: 0.0,
            ..CalibrationChain::reference()
        };
        assert_eq!(efficiency_decomposition(3.9e-7, &lossless).unwrap().nominal, 3.9e-7);
        assert!(efficiency_decomposition(0.0, &lossless).is_err());
    }

    #[test]
    fn chain_validation() {
        let bad = CalibrationChain {
            grating_split_uncertainty_db: 13.0,
            ..CalibrationChain::reference()
        };
        assert!(bad.validate().is_err());
        assert!(CalibrationChain::new(1.0, -1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn filter_cascade() {
        let c = FilterCascade::reference();
        let closed = REFERENCE_STAGE_FWHM_HZ * (2f64.sqrt() - 1.0).sqrt();
        assert_relative_eq!(c.combined_fwhm_hz(), closed, max_relative = 1e-8);
        assert!((c.combined_fwhm_hz() - 30e6).abs() < 0.1e6);
        assert_eq!(filter_transmission(&c, 0.0), 0.0);
        let at_mw = filter_transmission(&c, 6.8e9);
        let oracle = -20.0 * (1.0 + (2.0 * 6.8e9 / 46.6e6f64).powi(2)).log10();
        assert_relative_eq!(at_mw, oracle, max_relative = 1e-12);
        assert!((at_mw + 98.6).abs() < 0.1);
        assert!(FilterCascade::new(vec![FilterStage { fwhm_hz: 0.0, center_offset_hz: 0.0 }]).is_err());
    }

    #[test]
    fn count_rates() {
        let chain = CalibrationChain::reference();
        let cascade = FilterCascade::reference();
        let det = DetectorModel::default();
        let off = MicrowaveDrive::new(angular(6.8e9), 0.0).unwrap();
        assert_eq!(snspd_count_rate(1e-6, &off, &chain, &cascade, &det, 0.0).unwrap(), 4.8e3);
        let mw = MicrowaveDrive::new(angular(6.8e9), 1e-9).unwrap();
        let far = snspd_count_rate(1e-6, &mw, &chain, &cascade, &det, 1e12).unwrap();
        assert!((far - 4.8e3) < 1e-6);
        let r1 = snspd_count_rate(1e-6, &mw, &chain, &cascade, &det, 0.0).unwrap() - 4.8e3;
        let mw2 = MicrowaveDrive::new(angular(6.8e9), 3e-9).unwrap();
        let r3 = snspd_count_rate(1e-6, &mw2, &chain, &cascade, &det, 0.0).unwrap() - 4.8e3;
        assert_relative_eq!(r3, 3.0 * r1, max_relative = 1e-12);
        // 1 nW at 6.8 GHz is 2.22e14 photons/s; 12.2 dB out-coupler loss
        assert_relative_eq!(r1, 1e-6 * 1e-9 / (6.626_070_15e-34 * 6.8e9) / 16.595_869_074_375_6, max_relative = 1e-9);
    }

    #[test]
    fn fsr() {
        assert_relative_eq!(acoustic_fsr(6000.0, 500e-6).unwrap(), 6.0e6, max_relative = 1e-12);
        assert!((acoustic_fsr(6000.0, 500e-6).unwrap() - 6.2e6).abs() / 6.2e6 < 0.05);
        assert_relative_eq!(acoustic_fsr(6000.0, 1e-3).unwrap(), 3.0e6, max_relative = 1e-12);
        assert!(acoustic_fsr(0.0, 1e-3).is_err());
    }

    proptest! {
        #[test]
        fn heterodyne_round_trip(p in 1e-12f64..1e-2, lo in 1e-6f64..1e-2, g in 1e2f64..1e6) {
            let back = sideband_power_from_rsa(heterodyne_power(p, lo, g), lo, g).unwrap();
            prop_assert!((back - p).abs() <= 1e-12 * p);
        }

        #[test]
        fn attenuations_compose(p in 1e-9f64..1.0, x in 0.0f64..40.0, y in 0.0f64..40.0) {
            let chain = |db| CalibrationChain { mw_attenuation_db: db, ..CalibrationChain::reference() };
            let two = power_at_device(power_at_device(p, &chain(x)).unwrap(), &chain(y)).unwrap();
            let swapped = power_at_device(power_at_device(p, &chain(y)).unwrap(), &chain(x)).unwrap();
            let one = power_at_device(p, &chain(x + y)).unwrap();
            prop_assert!((two - one).abs() <= 1e-12 * one);
            prop_assert!((two - swapped).abs() <= 1e-12 * one);
        }

        #[test]
        fn filter_even_and_nonpositive(d in -1e10f64..1e10, w1 in 1e6f64..1e9, w2 in 1e6f64..1e9) {
            let c = FilterCascade::new(vec![
                FilterStage { fwhm_hz: w1, center_offset_hz: 0.0 },
                FilterStage { fwhm_hz: w2, center_offset_hz: 0.0 },
            ]).unwrap();
            prop_assert_eq!(filter_transmission(&c, d), filter_transmission(&c, -d));
            prop_assert!(filter_transmission(&c, d) <= 0.0);
            if d != 0.0 {
                prop_assert!(filter_transmission(&c, d) < 0.0);
            }
        }

        #[test]
        fn counts_never_below_background(eta in 0.0f64..1e-3, p in 0.0f64..1e-6, d in -1e9f64..1e9, qe in 0.0f64..1.0) {
            let det = DetectorModel { quantum_efficiency: qe, background_rate: 4.8e3 };
            let mw = MicrowaveDrive::new(angular(6.8e9), p).unwrap();
            let r = snspd_count_rate(eta, &mw, &CalibrationChain::reference(), &FilterCascade::reference(), &det, d).unwrap();
            prop_assert!(r >= 4.8e3);
            if eta == 0.0 || p == 0.0 || qe == 0.0 {
                prop_assert_eq!(r, 4.8e3);
            }
        }
    }
}
