//! g0 from voxelized mode fields, checked against the uniform-field closed form.

use eo_transducer::constants::{angular, ordinary, EPSILON_0, HBAR};
use eo_transducer::coupling::{
    diagonal_permittivity, g0_overlap_full, g0_overlap_r33, gv_from_g0, write_field_grid, zero_point_voltage,
    CircuitParams, EoTensor, FieldGrid, OverlapInputs, VoxelData,
};
use num_complex::Complex64;

fn uniform(n: usize, dv: f64, eps: f64) -> eo_transducer::Result<FieldGrid> {
    FieldGrid::from_fn([n, n, n], dv, |_| VoxelData {
        field: [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        permittivity: diagonal_permittivity([eps; 3]),
        in_eo_region: true,
    })
}

fn main() -> eo_transducer::Result<()> {
    let n_e: f64 = 2.14;
    let r33 = 31e-12;
    let dv = 1e-18;
    let a = uniform(8, dv, n_e * n_e)?;
    let c = uniform(8, dv, n_e * n_e)?;
    let (fa, fb, fc) = (193.41e12, 193.40e12, 6.8e9);
    let inputs = OverlapInputs {
        a: &a,
        b: &a,
        c: &c,
        omega_a: angular(fa),
        omega_b: angular(fb),
        omega_c: angular(fc),
    };
    let full = g0_overlap_full(&inputs, &EoTensor::r33_only(r33))?;
    let z = g0_overlap_r33(&inputs, n_e, r33)?;

    // all three fields uniform over the same volume V
    let v = 512.0 * dv;
    let eps = n_e * n_e;
    let norm = |w: f64| (HBAR * w / (2.0 * EPSILON_0 * eps * v)).sqrt();
    let closed = EPSILON_0 * eps * eps * r33 * norm(angular(fa)) * norm(angular(fb)) * norm(angular(fc)) * v / HBAR;
    println!("g0/2pi  full tensor  {:.6e} Hz", ordinary(full.magnitude));
    println!("g0/2pi  r33 only     {:.6e} Hz", ordinary(z.magnitude));
    println!("g0/2pi  closed form  {:.6e} Hz", ordinary(closed));

    let circuit = CircuitParams::from_impedance(300.0, angular(6.8e9))?;
    let v_zp = zero_point_voltage(&circuit);
    println!("\n300 ohm resonator: C = {:.1} fF, V_zp = {:.3} uV", circuit.c_total * 1e15, v_zp * 1e6);
    println!("implied g_V/2pi = {:.3e} Hz/V", ordinary(gv_from_g0(full.magnitude, v_zp)));

    let mut buf = Vec::new();
    write_field_grid(&a, &mut buf).expect("writing to memory");
    let text = String::from_utf8_lossy(&buf);
    println!("\nfield file head:");
    for line in text.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
