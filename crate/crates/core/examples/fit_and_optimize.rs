//! Fit g0 to a measured efficiency, then search for better extrinsic couplings.

use eo_transducer::constants::{angular, ordinary};
use eo_transducer::scenario::{fit_g0, optimize_coupling, CouplingBounds, FitRequest};
use eo_transducer::DeviceParams;

fn main() -> eo_transducer::Result<()> {
    let p = DeviceParams::reference();
    let g0 = fit_g0(&FitRequest {
        measured_efficiency_per_watt: 9.5e-8 * 1e6,
        device: p,
    })?;
    println!("measured 9.5e-8 per uW -> g0/2pi = {:.1} Hz", ordinary(g0));

    let bounds = CouplingBounds {
        kappa_b_e: (angular(1e6), angular(5e9)),
        kappa_c_e: (angular(1e4), angular(100e6)),
    };
    let best = optimize_coupling(&p.with_g0(g0)?, 1e-6, &bounds)?;
    println!("optimum kappa_b_e/2pi = {:.1} MHz", ordinary(best.kappa_b_e) / 1e6);
    println!("optimum kappa_c_e/2pi = {:.2} MHz", ordinary(best.kappa_c_e) / 1e6);
    println!("efficiency per uW     = {:.3e}", best.efficiency);
    println!("cycles {}, at boundary {}", best.cycles, best.at_boundary);
    Ok(())
}
