//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fail.

use std::process::ExitCode;

use eo_transducer::constants::{angular, ordinary, EPSILON_0, HBAR};
use eo_transducer::coupling::{
    diagonal_permittivity, g0_overlap_chi2, g0_overlap_full, g0_overlap_r33, Chi2Tensor, EoTensor, FieldGrid,
    OverlapInputs, VoxelData,
};
use eo_transducer::measurement::{
    acoustic_fsr, efficiency_decomposition, heterodyne_power, power_at_device, sideband_power_from_rsa,
    CalibrationChain,
};
use eo_transducer::scenario::{
    fit_g0, optimize_coupling, run_sweep, CouplingBounds, FitRequest, Scenario, SweepScenario,
};
use eo_transducer::transduction::{
    conversion_bandwidth, cooperativity_from_efficiency, efficiency_full, efficiency_low_c, pair_generation_rate,
    resonant_pump_advantage, sideband_spectrum, single_resonance_penalty_db, steady_state_solve, thermal_occupancy,
    Backaction, DetuningSet, OperatingPoint, SidebandWeighting, SolverOptions,
};
use eo_transducer::units::{apply_loss_db, dbm_to_watt, watt_to_dbm};
use eo_transducer::{validate_device_params, DeviceParams, MicrowaveDrive, RawDeviceParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_efficiency() -> Check {
    let p = DeviceParams::reference();
    let op = OperatingPoint::resonant(&p, 1e-6, 0.0).unwrap();
    let eta = efficiency_low_c(&p, &op);
    ensure(
        (eta - 9.7e-8).abs() < 0.05e-8 && rel(eta, 9.5e-8) <= 0.10,
        format!("eta = {eta:.4e} per uW (model 9.7e-8, measured 9.5e-8 +/- 10%)"),
    )
}

fn c2_selectivity() -> Check {
    let p = DeviceParams::reference();
    let mw = MicrowaveDrive::new(p.omega_c(), 0.0).unwrap();
    let pt = sideband_spectrum(&p, &[p.omega_a()], 1e-6, &mw, SidebandWeighting::Equal)[0];
    let db = 10.0 * (pt.anti_stokes / pt.stokes).log10();
    ensure(
        (db - 24.6).abs() <= 0.3 && (db - 24.2).abs() <= 1.0,
        format!("anti-Stokes/Stokes = {db:.3} dB (24.6 +/- 0.3; measured 24.2 +/- 1)"),
    )
}

fn c3_single_resonance() -> Check {
    let db = single_resonance_penalty_db(&DeviceParams::reference());
    ensure(
        (db - 23.4).abs() <= 0.05 && (db - 24.2).abs() <= 2.0,
        format!("penalty = {db:.3} dB (23.4; measured 24.2 +/- 2)"),
    )
}

fn c4_bandwidth() -> Check {
    let p = DeviceParams::reference();
    let op = OperatingPoint::resonant(&p, 1e-6, 0.0).unwrap();
    let bw = conversion_bandwidth(&p, &op).map_err(|e| e.to_string())?;
    ensure(
        (bw - 21.6e6).abs() <= 2e3 && rel(bw, 20e6) <= 0.20,
        format!("bandwidth = {:.4} MHz (21.6; ~20 +/- 20%)", bw / 1e6),
    )
}

fn c5_thermal() -> Check {
    let n = |t: f64| thermal_occupancy(6.801e9, t).unwrap();
    let (n1, n01, n001) = (n(1.0), n(0.1), n(0.01));
    let model = rel(n1, 2.59) < 0.005 && rel(n01, 0.0398) < 0.005 && rel(n001, 6.7e-15) < 0.01;
    let paper = n1.round() == 3.0 && (n01 * 100.0).round() / 100.0 == 0.04 && n001.log10().floor() == (8e-15f64).log10().floor();
    ensure(model && paper, format!("n_th(1 K, 100 mK, 10 mK) = {n1:.3}, {n01:.4}, {n001:.2e}"))
}

fn c6_fit() -> Check {
    let g0 = fit_g0(&FitRequest {
        measured_efficiency_per_watt: 9.5e-8 * 1e6,
        device: DeviceParams::reference(),
    })
    .map_err(|e| e.to_string())?;
    let khz = ordinary(g0) / 1e3;
    ensure(
        (khz - 1.19).abs() < 0.005 && rel(khz, 1.2) <= 0.03,
        format!("g0/2pi = {khz:.4} kHz (1.19; 1.2 +/- 3%)"),
    )
}

fn c7_fsr() -> Check {
    let f = acoustic_fsr(6000.0, 500e-6).map_err(|e| e.to_string())?;
    ensure(
        rel(f, 6.0e6) < 1e-12 && rel(f, 6.2e6) <= 0.05,
        format!("FSR = {:.3} MHz (6.0; observed 6.2 +/- 5%)", f / 1e6),
    )
}

fn c8_resonant_pump() -> Check {
    let p = DeviceParams::reference();
    let k = resonant_pump_advantage(angular(6.8e9), p.kappa_b()).map_err(|e| e.to_string())?;
    ensure(
        (k - 5.1e2).abs() < 5.0 && (1e2..=1e3).contains(&k),
        format!("4 w_mu^2 / kappa_b^2 = {k:.1} (5.1e2, between 1e2 and 1e3)"),
    )
}

fn c9_pair_rate() -> Check {
    let p = DeviceParams::reference();
    // assumed C: the one implied by the off-chip efficiency 3.9e-7
    let c = cooperativity_from_efficiency(3.9e-7, &p);
    let r = pair_generation_rate(c, p.kappa_b_e(), p.kappa_c_e(), p.kappa_b());
    ensure(
        (20.0..=100.0).contains(&r.rate) && !r.outside_low_cooperativity,
        format!("R = {:.1} pairs/s at assumed C = {c:.4e} (20..100)", r.rate),
    )
}

fn random_device(rng: &mut ChaCha8Rng) -> DeviceParams {
    let mut log = |lo: f64, hi: f64| 10f64.powf(rng.random_range(lo.log10()..hi.log10()));
    let omega_a = angular(log(1.9e14, 2.0e14));
    let omega_c = angular(log(1e9, 2e10));
    validate_device_params(RawDeviceParams {
        omega_a,
        omega_b: omega_a + omega_c * log(0.9, 1.1),
        omega_c,
        kappa_a_i: angular(log(1e7, 1e9)),
        kappa_a_e: angular(log(1e7, 1e9)),
        kappa_b_i: angular(log(1e7, 1e9)),
        kappa_b_e: angular(log(1e7, 1e9)),
        kappa_c_i: angular(log(1e5, 1e8)),
        kappa_c_e: angular(log(1e5, 1e8)),
        g0: angular(log(1e2, 1e4)),
        mu: angular(log(1e8, 1e10)),
    })
    .unwrap()
}

fn solver_vs_closed_forms() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_device(&mut rng);
        let det = DetuningSet {
            delta_a: p.kappa_a() * rng.random_range(-2.0..2.0),
            delta_b: p.kappa_b() * rng.random_range(-2.0..2.0),
            delta_c: p.kappa_c() * rng.random_range(-2.0..2.0),
        };
        let pump = 10f64.powf(rng.random_range(-9.0..-3.0));
        let op = OperatingPoint::resonant(&p, pump, 1e-9).unwrap().with_detunings(det);
        for mode in [Backaction::Excluded, Backaction::Included] {
            let s = steady_state_solve(&p, &op, mode, SolverOptions::default()).map_err(|e| e.to_string())?;
            let eta = s.efficiency(&p, &op).unwrap();
            let closed = match mode {
                Backaction::Excluded => efficiency_low_c(&p, &op),
                Backaction::Included => efficiency_full(&p, &op).efficiency,
            };
            worst = worst.max(rel(eta, closed));
        }
    }
    ensure(worst <= 1e-9, format!("solver vs closed forms, 1000 sets: worst rel {worst:.2e}"))
}

fn full_vs_cooperativity_form() -> Check {
    let p = DeviceParams::reference();
    let mut worst: f64 = 0.0;
    for i in 0..=90 {
        let pump = 10f64.powf(-9.0 + 0.1 * i as f64);
        let op = OperatingPoint::resonant(&p, pump, 0.0).unwrap();
        let r = efficiency_full(&p, &op);
        let c = r.cooperativity;
        let closed = 4.0 * c / ((1.0 + c) * (1.0 + c)) * (p.kappa_b_e() / p.kappa_b()) * (p.kappa_c_e() / p.kappa_c());
        worst = worst.max(rel(r.efficiency, closed));
    }
    ensure(worst <= 1e-12, format!("full vs 4C/(1+C)^2 form: worst rel {worst:.2e}"))
}

fn random_grid(rng: &mut ChaCha8Rng, eps: [f64; 3]) -> FieldGrid {
    FieldGrid::from_fn([6, 5, 4], 1e-18, |[i, _, _]| {
        let mut z = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        VoxelData {
            field: [z(), z(), z()],
            permittivity: diagonal_permittivity(eps),
            in_eo_region: i >= 2,
        }
    })
    .unwrap()
}

fn linbo3() -> EoTensor {
    let (r13, r22, r33, r51) = (9.6e-12, 6.8e-12, 30.9e-12, 32.6e-12);
    EoTensor::from_contracted([
        [0.0, -r22, r13],
        [0.0, r22, r13],
        [0.0, 0.0, r33],
        [0.0, r51, 0.0],
        [r51, 0.0, 0.0],
        [-r22, 0.0, 0.0],
    ])
    .unwrap()
}

fn r_vs_chi2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let eps = [2.21f64.powi(2), 2.21f64.powi(2), 2.14f64.powi(2)];
    let r = linbo3();
    let chi = Chi2Tensor::from_eo(&r, eps);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (a, b, c) = (random_grid(&mut rng, eps), random_grid(&mut rng, eps), random_grid(&mut rng, eps));
        let inputs = OverlapInputs {
            a: &a,
            b: &b,
            c: &c,
            omega_a: angular(193.41e12),
            omega_b: angular(193.42e12),
            omega_c: angular(6.8e9),
        };
        let x = g0_overlap_full(&inputs, &r).map_err(|e| e.to_string())?.value();
        let y = g0_overlap_chi2(&inputs, &chi).map_err(|e| e.to_string())?.value();
        worst = worst.max((x - y).norm() / x.norm());
    }
    ensure(worst <= 1e-12, format!("r-tensor vs chi2 overlap: worst rel {worst:.2e}"))
}

fn uniform_closed_form() -> Check {
    let (n_e, r33, dv, n) = (2.14f64, 31e-12, 1e-18, 10usize);
    let eps = n_e * n_e;
    let grid = FieldGrid::from_fn([n; 3], dv, |_| VoxelData {
        field: [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        permittivity: diagonal_permittivity([eps; 3]),
        in_eo_region: true,
    })
    .unwrap();
    let (wa, wb, wc) = (angular(193.41e12), angular(193.42e12), angular(6.8e9));
    let inputs = OverlapInputs {
        a: &grid,
        b: &grid,
        c: &grid,
        omega_a: wa,
        omega_b: wb,
        omega_c: wc,
    };
    let g = g0_overlap_r33(&inputs, n_e, r33).map_err(|e| e.to_string())?.magnitude;
    // each normalized field is sqrt(hbar w / (2 eps0 eps V)) over the whole volume V
    let v = (n * n * n) as f64 * dv;
    let amp = |w: f64| (HBAR * w / (2.0 * EPSILON_0 * eps * v)).sqrt();
    let closed = EPSILON_0 * eps * eps * r33 * amp(wa) * amp(wb) * amp(wc) * v / HBAR;
    let e = rel(g, closed);
    ensure(e <= 1e-6, format!("uniform-field g0 vs closed form: rel {e:.2e}"))
}

fn calibration_round_trips() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let chain = CalibrationChain::reference();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let sb = 10f64.powf(rng.random_range(-15.0..-3.0));
        let lo = 10f64.powf(rng.random_range(-6.0..-2.0));
        let gain = 10f64.powf(rng.random_range(2.0..6.0));
        let back = sideband_power_from_rsa(heterodyne_power(sb, lo, gain), lo, gain).unwrap();
        worst = worst.max(rel(back, sb));

        let dbm = rng.random_range(-60.0..20.0);
        let w = dbm_to_watt(dbm).unwrap();
        worst = worst.max(((watt_to_dbm(w).unwrap() - dbm) / dbm.abs().max(1.0)).abs());
        let at = power_at_device(w, &chain).unwrap();
        worst = worst.max(rel(at * 10f64.powf(chain.mw_attenuation_db / 10.0), w));

        let eta = 10f64.powf(rng.random_range(-9.0..-3.0));
        let on = efficiency_decomposition(eta, &chain).unwrap().nominal;
        worst = worst.max(rel(apply_loss_db(on, chain.output_coupler_loss_db()).unwrap(), eta));
    }
    ensure(worst <= 1e-12, format!("calibration round trips: worst rel {worst:.2e}"))
}

fn optimizer_stationarity() -> Check {
    let p = DeviceParams::reference();
    let bounds = CouplingBounds {
        kappa_b_e: (angular(1e6), angular(5e9)),
        kappa_c_e: (angular(1e4), angular(100e6)),
    };
    let o = optimize_coupling(&p, 1e-6, &bounds).map_err(|e| e.to_string())?;
    let op = OperatingPoint::resonant(&p, 1e-6, 0.0).unwrap();
    let eta = |kb: f64, kc: f64| efficiency_low_c(&p.with_extrinsic(kb, kc).unwrap(), &op);
    let mut worst: f64 = 0.0;
    for (k, d) in [(o.kappa_b_e, [1.0, 0.0]), (o.kappa_c_e, [0.0, 1.0])] {
        let h = 1e-5 * k;
        let plus = eta(o.kappa_b_e + d[0] * h, o.kappa_c_e + d[1] * h);
        let minus = eta(o.kappa_b_e - d[0] * h, o.kappa_c_e - d[1] * h);
        // logarithmic derivative d ln(eta) / d ln(k)
        worst = worst.max(((plus - minus) / (2.0 * h) * k / o.efficiency).abs());
    }
    ensure(
        worst <= 1e-6 && !o.at_boundary,
        format!("optimizer: |d ln eta / d ln k| = {worst:.2e} at interior optimum"),
    )
}

fn sweep_determinism() -> Check {
    let text = format!(
        "{}\n[sweep]\naxis = \"microwave_frequency\"\nstart = 6.7e9\nstop = 6.9e9\ncount = 401\nparallel_threshold = 2\noutputs = [\"efficiency_full\", \"efficiency_steady_state\", \"anti_stokes_efficiency\", \"count_rate\"]\n",
        include_str!("../scenarios/reference.toml")
    );
    let scenario = Scenario::from_toml_str(&text).map_err(|e| e.to_string())?;
    let sweep = SweepScenario::from_scenario(&scenario).map_err(|e| e.to_string())?;
    let serial = SweepScenario {
        parallel_threshold: usize::MAX,
        ..sweep.clone()
    };
    let reference = run_sweep(&serial, None).map_err(|e| e.to_string())?.to_csv_string().map_err(|e| e.to_string())?;
    for threads in [Some(1), Some(2), Some(3), Some(8), None] {
        for _ in 0..3 {
            let csv = run_sweep(&sweep, threads).map_err(|e| e.to_string())?.to_csv_string().map_err(|e| e.to_string())?;
            if csv != reference {
                return Err(format!("sweep CSV differs with threads = {threads:?}"));
            }
        }
    }
    Ok(format!("sweep CSV byte-identical across 1/2/3/8/default threads ({} bytes)", reference.len()))
}

fn c10_properties() -> Check {
    let parts = [
        solver_vs_closed_forms(),
        full_vs_cooperativity_form(),
        r_vs_chi2(),
        uniform_closed_form(),
        calibration_round_trips(),
        optimizer_stationarity(),
        sweep_determinism(),
    ];
    let ok = parts.iter().all(|p| p.is_ok());
    let detail = parts
        .iter()
        .map(|p| match p {
            Ok(s) => format!("\n    ok   {s}"),
            Err(s) => format!("\n    FAIL {s}"),
        })
        .collect::<String>();
    ensure(ok, format!("property suites:{detail}"))
}

fn c11_calibration() -> Check {
    let (sb, lo, gain) = (3.4e-6, 390e-6, 1.02e4);
    let rsa = heterodyne_power(sb, lo, gain);
    let back = sideband_power_from_rsa(rsa, lo, gain).map_err(|e| e.to_string())?;
    let b = efficiency_decomposition(3.9e-7, &CalibrationChain::reference()).map_err(|e| e.to_string())?;
    ensure(
        rel(rsa, gain * sb * lo) < 1e-15 && rel(back, sb) <= 1e-12 && b.low <= 6.6e-6 && 6.6e-6 <= b.high,
        format!(
            "P_RSA = {rsa:.4e} W, inverse {back:.4e} W; on-chip {:.3e} in [{:.3e}, {:.3e}] contains 6.6e-6",
            b.nominal, b.low, b.high
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("per-uW on-chip efficiency", c1_efficiency),
        ("sideband selectivity", c2_selectivity),
        ("single-resonance penalty", c3_single_resonance),
        ("conversion bandwidth", c4_bandwidth),
        ("thermal occupancy", c5_thermal),
        ("g0 fit round trip", c6_fit),
        ("acoustic FSR", c7_fsr),
        ("resonant-pump advantage", c8_resonant_pump),
        ("pair generation rate", c9_pair_rate),
        ("property suites", c10_properties),
        ("calibration arithmetic", c11_calibration),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {:>2} {name}: {detail}", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
