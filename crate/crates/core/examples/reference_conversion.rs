//! Conversion efficiency, cooperativity and bandwidth of the reference device.

use eo_transducer::constants::{angular, ordinary};
use eo_transducer::transduction::{
    conversion_bandwidth, efficiency_critical_coupling, efficiency_full, efficiency_low_c, resonant_pump_advantage,
    steady_state_solve, Backaction, IntrinsicRates, MicrowaveCoupling, OperatingPoint, SolverOptions,
};
use eo_transducer::{DeviceParams, PumpDrive};

fn main() -> eo_transducer::Result<()> {
    let p = DeviceParams::reference();
    let op = OperatingPoint::resonant(&p, 1e-6, 1e-9)?;

    let full = efficiency_full(&p, &op);
    println!("pump 1 uW on mode a, microwave on resonance");
    println!("  eta (low C)       {:.4e}", efficiency_low_c(&p, &op));
    println!("  eta (full)        {:.4e}", full.efficiency);
    println!("  C                 {:.4e}", full.cooperativity);
    println!("  n_a               {:.1}", full.n_pump_photons);
    println!("  bandwidth         {:.2} MHz", conversion_bandwidth(&p, &op)? / 1e6);

    let sol = steady_state_solve(&p, &op, Backaction::Included, SolverOptions::default())?;
    println!(
        "  eta (solver)      {:.4e}  ({} iterations, residual {:.1e})",
        sol.efficiency(&p, &op).unwrap_or(0.0),
        sol.iterations,
        sol.residual
    );

    let pump = PumpDrive::new(p.omega_a(), 1e-6)?;
    let crit = efficiency_critical_coupling(p.g0(), IntrinsicRates::of(&p), &pump, MicrowaveCoupling::DoubleSided)?;
    println!("  eta (critical)    {:.4e}", crit);
    let adv = resonant_pump_advantage(angular(6.8e9), p.kappa_b())?;
    println!("  resonant pump gain over a single resonance: {adv:.1}");
    println!("  extraction ceiling {:.3}", p.extraction_ceiling());
    println!("  g0/2pi            {:.0} Hz", ordinary(p.g0()));
    Ok(())
}
