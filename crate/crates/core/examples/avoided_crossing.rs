//! Supermode frequencies and mixing angle as the DC bias tunes one racetrack.

use eo_transducer::constants::{angular, ordinary};
use eo_transducer::hybridization::{
    avoided_crossing_spectrum, optical_transmission_spectrum, supermode_frequencies, BareOpticalModes,
};
use eo_transducer::DeviceParams;

fn main() -> eo_transducer::Result<()> {
    let p = DeviceParams::reference();
    // bare modes 4 GHz apart at zero bias, b' tuned at 0.2 GHz/V
    let bare = BareOpticalModes::new(angular(193.4144e12), angular(193.4104e12), p.mu(), angular(0.2e9))?;

    let biases: Vec<f64> = (-4..=12).map(|i| 5.0 * i as f64).collect();
    println!("{:>8} {:>14} {:>14} {:>12} {:>8}", "bias V", "f_a - f0 GHz", "f_b - f0 GHz", "split GHz", "theta");
    let f0 = 193.41e12;
    for row in avoided_crossing_spectrum(&bare, &biases)? {
        let m = supermode_frequencies(&bare, row.bias_v);
        println!(
            "{:>8.1} {:>14.3} {:>14.3} {:>12.3} {:>8.4}",
            row.bias_v,
            (ordinary(row.omega_a) - f0) / 1e9,
            (ordinary(row.omega_b) - f0) / 1e9,
            ordinary(m.splitting()) / 1e9,
            m.theta
        );
    }

    let at = supermode_frequencies(&bare, 20.0);
    let probes: Vec<f64> = (0..=8).map(|i| at.omega_a + angular(1e9) * i as f64).collect();
    println!("\ntransmission at full hybridization (20 V)");
    for (w, t) in optical_transmission_spectrum(&at, [p.loss_a(), p.loss_b()], &probes) {
        println!("  {:+.1} GHz  {:.4}", ordinary(w - at.omega_a) / 1e9, t);
    }
    Ok(())
}
