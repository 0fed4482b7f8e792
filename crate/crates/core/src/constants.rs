//! Physical constants in SI units.
//!
//! All values from CODATA 2018 (exact where the SI redefinition fixed them).

/// Reduced Planck constant (J·s)
pub const HBAR: f64 = 1.054_571_817e-34;

/// Planck constant (J·s), exact
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Boltzmann constant (J/K), exact
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Vacuum permittivity (F/m)
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Speed of light in vacuum (m/s), exact
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const TWO_PI: f64 = std::f64::consts::TAU;

/// The constant set used throughout the toolkit, bundled for callers that
/// want to pass it around or print it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub planck_reduced: f64,
    pub planck: f64,
    pub boltzmann: f64,
    pub vacuum_permittivity: f64,
    pub speed_of_light: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    planck_reduced: HBAR,
    planck: PLANCK,
    boltzmann: BOLTZMANN,
    vacuum_permittivity: EPSILON_0,
    speed_of_light: SPEED_OF_LIGHT,
};

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA_2018
    }
}

/// Ordinary frequency (Hz) to angular frequency (rad/s).
#[inline]
pub fn angular(freq_hz: f64) -> f64 {
    TWO_PI * freq_hz
}

/// Angular frequency (rad/s) to ordinary frequency (Hz).
#[inline]
pub fn ordinary(omega: f64) -> f64 {
    omega / TWO_PI
}
