//! Coupled-mode design and analysis toolkit for triply-resonant
//! electro-optic microwave-to-optical transducers.

pub mod cli;
pub mod constants;
pub mod coupling;
pub mod error;
pub mod hybridization;
pub mod measurement;
pub mod params;
pub mod scenario;
pub mod transduction;
pub mod units;

pub use error::{Error, Result};
pub use params::{validate_device_params, DeviceParams, MicrowaveDrive, ModeLoss, PumpDrive, RawDeviceParams};
