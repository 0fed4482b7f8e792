//! Two evanescently coupled racetrack modes and their supermodes.
//!
//! The bare modes `a'`, `b'` with coupling `mu` form the Hermitian matrix
//! `[[omega_a', mu], [mu, omega_b']]`. Its eigenvalues are the supermode
//! frequencies and the rotation that diagonalizes it is the mixing angle.
//! A DC bias `V` moves the bare detuning linearly, `Δ'(V) = Δ'₀ + g_dc V`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ModeLoss;

/// Uncoupled racetrack resonances and their DC tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareOpticalModes {
    pub omega_a_prime: f64,
    pub omega_b_prime: f64,
    pub mu: f64,
    /// Rate of change of the bare detuning with bias voltage (rad/s per V).
    pub g_v_dc: f64,
}

impl BareOpticalModes {
    pub fn new(omega_a_prime: f64, omega_b_prime: f64, mu: f64, g_v_dc: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid("mu", format!("must be > 0, got {mu}")));
        }
        if !(omega_a_prime.is_finite() && omega_b_prime.is_finite() && g_v_dc.is_finite()) {
            return Err(Error::domain("bare mode frequencies and tuning rate must be finite"));
        }
        Ok(Self {
            omega_a_prime,
            omega_b_prime,
            mu,
            g_v_dc,
        })
    }

    /// Bare modes centred on `center` with zero-bias detuning `delta_prime`.
    pub fn centered(center: f64, delta_prime: f64, mu: f64, g_v_dc: f64) -> Result<Self> {
        Self::new(center - 0.5 * delta_prime, center + 0.5 * delta_prime, mu, g_v_dc)
    }

    /// Bare detuning Δ' = ω_b' − ω_a' at bias `bias_v`. The bias electrodes
    /// sit on the b' racetrack, so only ω_b' moves.
    pub fn delta_prime(&self, bias_v: f64) -> f64 {
        self.omega_b_prime + self.g_v_dc * bias_v - self.omega_a_prime
    }
}

/// Supermode frequencies (ω_a ≤ ω_b) and the mixing angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridizedModes {
    pub omega_a: f64,
    pub omega_b: f64,
    pub theta: f64,
}

impl HybridizedModes {
    pub fn splitting(&self) -> f64 {
        self.omega_b - self.omega_a
    }
}

/// Mixing angle θ = ½·atan2(2µ, Δ'), which stays in (0, π/2) and passes
/// continuously through π/4 at Δ' = 0.
pub fn mixing_angle(delta_prime: f64, mu: f64) -> Result<f64> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::domain(format!("coupling mu must be > 0, got {mu}")));
    }
    Ok(0.5 * (2.0 * mu).atan2(delta_prime))
}

/// Diagonalize the coupled pair at bias `bias_v`.
pub fn supermode_frequencies(bare: &BareOpticalModes, bias_v: f64) -> HybridizedModes {
    let delta = bare.delta_prime(bias_v);
    let omega_b_prime = bare.omega_a_prime + delta;
    let mean = 0.5 * (bare.omega_a_prime + omega_b_prime);
    let half_split = bare.mu.hypot(0.5 * delta);
    HybridizedModes {
        omega_a: mean - half_split,
        omega_b: mean + half_split,
        theta: 0.5 * (2.0 * bare.mu).atan2(delta),
    }
}

/// Self-modulation and cross-coupling weights of the microwave field in the
/// supermode basis: `(2cos²θ − sin²θ, 2sin²θ − cos²θ, 3 sinθ cosθ)`.
///
/// The 2:−1 ratio of the bare-mode modulation comes from the electrode
/// layout, which drives the a' racetrack on two sides and b' on one.
pub fn interaction_coefficients(theta: f64) -> (f64, f64, f64) {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    (2.0 * c2 - s2, 2.0 * s2 - c2, 3.0 * s * c)
}

/// One row of an avoided-crossing map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingRow {
    pub bias_v: f64,
    pub omega_a: f64,
    pub omega_b: f64,
}

pub fn avoided_crossing_spectrum(bare: &BareOpticalModes, biases: &[f64]) -> Result<Vec<CrossingRow>> {
    if biases.is_empty() {
        return Err(Error::Usage("bias range must contain at least one voltage".into()));
    }
    Ok(biases
        .iter()
        .map(|&v| {
            let m = supermode_frequencies(bare, v);
            CrossingRow {
                bias_v: v,
                omega_a: m.omega_a,
                omega_b: m.omega_b,
            }
        })
        .collect())
}

/// Power transmission past one side-coupled resonance.
pub fn single_mode_transmission(omega_mode: f64, loss: ModeLoss, omega_probe: f64) -> f64 {
    let denom = Complex64::new(0.5 * loss.total, omega_mode - omega_probe);
    (Complex64::new(1.0, 0.0) - loss.extrinsic / denom).norm_sqr()
}

/// Feed-waveguide transmission |t(ω)|² of the two supermodes, modelled as the
/// product of the two single-mode responses. Interference between the two
/// supermode pathways is not included.
pub fn optical_transmission_spectrum(
    modes: &HybridizedModes,
    losses: [ModeLoss; 2],
    probes: &[f64],
) -> Vec<(f64, f64)> {
    probes
        .iter()
        .map(|&w| {
            let t = single_mode_transmission(modes.omega_a, losses[0], w)
                * single_mode_transmission(modes.omega_b, losses[1], w);
            (w, t)
        })
        .collect()
}
