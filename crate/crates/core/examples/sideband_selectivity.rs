//! Anti-Stokes/Stokes selectivity of the two-supermode pump.

use eo_transducer::constants::{angular, ordinary};
use eo_transducer::transduction::{
    selectivity_db, sideband_spectrum, single_resonance_penalty_db, single_resonance_penalty_sideband_db,
    SidebandWeighting,
};
use eo_transducer::{DeviceParams, MicrowaveDrive};

fn main() -> eo_transducer::Result<()> {
    let p = DeviceParams::reference();
    println!("selectivity (equal weights)   {:.2} dB", selectivity_db(&p, SidebandWeighting::Equal));
    let weighted = SidebandWeighting::SupermodeCoefficients { theta: std::f64::consts::FRAC_PI_4 };
    println!("selectivity (supermode coeff) {:.2} dB  (experimental)", selectivity_db(&p, weighted));
    println!("single-resonance penalty      {:.2} dB", single_resonance_penalty_db(&p));
    println!("  with sideband model         {:.2} dB", single_resonance_penalty_sideband_db(&p));

    let mw = MicrowaveDrive::new(p.omega_c(), 0.0)?;
    let pumps: Vec<f64> = (0..=20).map(|i| p.omega_a() + angular(-1e9 + 0.4e9 * i as f64)).collect();
    println!("\n{:>10} {:>14} {:>14}", "dp GHz", "anti-Stokes/uW", "Stokes/uW");
    for pt in sideband_spectrum(&p, &pumps, 1e-6, &mw, SidebandWeighting::Equal) {
        println!(
            "{:>10.2} {:>14.4e} {:>14.4e}",
            ordinary(pt.omega_p - p.omega_a()) / 1e9,
            pt.anti_stokes,
            pt.stokes
        );
    }
    Ok(())
}
