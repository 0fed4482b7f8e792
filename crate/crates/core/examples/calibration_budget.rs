//! From spectrum-analyzer power to on-chip efficiency and detector counts.

use eo_transducer::measurement::{
    acoustic_fsr, efficiency_decomposition, filter_transmission, heterodyne_power, power_at_device,
    sideband_power_from_rsa, snspd_count_rate, CalibrationChain, DetectorModel, FilterCascade,
};
use eo_transducer::units::{dbm_to_watt, photon_flux};
use eo_transducer::{DeviceParams, MicrowaveDrive};

fn main() -> eo_transducer::Result<()> {
    let chain = CalibrationChain::reference();
    let p_lo = 1e-3;
    let p_rsa = heterodyne_power(2e-13, p_lo, chain.heterodyne_gain);
    let p_sb = sideband_power_from_rsa(p_rsa, p_lo, chain.heterodyne_gain)?;
    println!("heterodyne: sideband {p_sb:.3e} W -> analyzer {p_rsa:.3e} W");

    let p_mw = power_at_device(dbm_to_watt(0.0)?, &chain)?;
    let eta_off = photon_flux(p_sb, 193.41e12)? / photon_flux(p_mw, 6.8e9)?;
    println!("0 dBm generator -> {:.3e} W at device, off-chip eta {:.3e}", p_mw, eta_off);

    let b = efficiency_decomposition(3.9e-7, &chain)?;
    println!(
        "off-chip 3.9e-7 -> on-chip {:.2e} (range {:.2e} .. {:.2e})",
        b.nominal, b.low, b.high
    );

    let filters = FilterCascade::reference();
    println!("\nfilter cascade FWHM {:.1} MHz", filters.combined_fwhm_hz() / 1e6);
    for det in [0.0, 15e6, 100e6, 6.8e9] {
        println!("  {:>10.1} MHz  {:>8.1} dB", det / 1e6, filter_transmission(&filters, det));
    }

    let p = DeviceParams::reference();
    let mw = MicrowaveDrive::new(p.omega_c(), 1e-12)?;
    let counts = snspd_count_rate(b.nominal, &mw, &chain, &filters, &DetectorModel::default(), 0.0)?;
    println!("\n1 pW microwave -> {counts:.0} counts/s including background");
    println!("acoustic FSR for 6 km/s through 500 um: {:.1} MHz", acoustic_fsr(6000.0, 500e-6)? / 1e6);
    Ok(())
}
