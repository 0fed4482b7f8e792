//! Thermal occupancy of the microwave mode and the spontaneous pair rate.

use eo_transducer::constants::ordinary;
use eo_transducer::transduction::{pair_generation_rate, thermal_occupancy};
use eo_transducer::DeviceParams;

fn main() -> eo_transducer::Result<()> {
    let p = DeviceParams::reference();
    let f = ordinary(p.omega_c());
    println!("{:>8} {:>12}", "T (K)", "n_th");
    for t in [0.01, 0.05, 0.1, 0.3, 1.0, 4.0] {
        println!("{:>8.2} {:>12.4e}", t, thermal_occupancy(f, t)?);
    }

    let c = 2.143e-6;
    let r = pair_generation_rate(c, p.kappa_b_e(), p.kappa_c_e(), p.kappa_b());
    println!("\npump on mode b, C = {c:.3e}: {:.1} pairs/s", r.rate);
    if r.outside_low_cooperativity {
        println!("warning: C is outside the low-cooperativity regime");
    }
    Ok(())
}
