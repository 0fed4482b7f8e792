//! Vacuum electro-optic coupling rate from sampled mode profiles.
//!
//! Fields are sampled on a uniform voxel grid and integrated with the
//! midpoint rule. Each mode is normalized to its zero-point energy over the
//! whole grid; the nonlinear overlap runs over the voxels flagged as
//! electro-optic material only:
//!
//! ```text
//! N_m  = √(ħω_m / (2ε₀ Σ_grid Σ_ij ε_ij e_mi e*_mj dV))
//! ħg₀  = ε₀ N_a N_b N_c Σ_masked Σ_ijk ε_ii ε_jj r_ijk e_ai e*_bj e_ck dV
//! ```
//!
//! The relative permittivity entering the overlap is the optical one, taken
//! from the mode-a grid. Each grid's own permittivity is used for its
//! normalization, so the microwave grid can carry microwave permittivities.
//!
//! Voxel sums are reduced in fixed-size chunks with compensated summation, so
//! results do not depend on the number of worker threads.

#![allow(clippy::needless_range_loop)]

mod fieldfile;

pub use fieldfile::{parse_field_grid, read_field_grid, write_field_grid, FIELD_FORMAT_TAG};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::{EPSILON_0, HBAR};
use crate::error::{Error, Result};

const CHUNK: usize = 4096;

/// One sample of a mode profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Voxel {
    pub index: [usize; 3],
    /// Complex field amplitude (x, y, z), arbitrary normalization.
    pub field: [Complex64; 3],
    /// Relative permittivity tensor.
    pub permittivity: [[f64; 3]; 3],
    /// Whether the voxel lies in the electro-optic material.
    pub in_eo_region: bool,
}

/// Per-voxel contents returned by the [`FieldGrid::from_fn`] builder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoxelData {
    pub field: [Complex64; 3],
    pub permittivity: [[f64; 3]; 3],
    pub in_eo_region: bool,
}

/// A complex vector field sampled on a uniform grid, stored in row-major
/// (i slowest, k fastest) order.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    shape: [usize; 3],
    voxel_volume: f64,
    voxels: Vec<Voxel>,
}

impl FieldGrid {
    /// Build a grid from voxels in any order. Every index in `shape` must
    /// appear exactly once.
    pub fn new(shape: [usize; 3], voxel_volume: f64, mut voxels: Vec<Voxel>) -> Result<Self> {
        if !(voxel_volume.is_finite() && voxel_volume > 0.0) {
            return Err(Error::invalid("voxel_volume", format!("must be > 0, got {voxel_volume}")));
        }
        let count = shape.iter().product::<usize>();
        if count == 0 {
            return Err(Error::invalid("shape", "every dimension must be at least 1"));
        }
        if voxels.len() != count {
            return Err(Error::invalid(
                "voxels",
                format!("shape {shape:?} needs {count} voxels, got {}", voxels.len()),
            ));
        }
        for v in &voxels {
            if v.index.iter().zip(shape).any(|(&i, n)| i >= n) {
                return Err(Error::invalid("index", format!("{:?} outside shape {shape:?}", v.index)));
            }
            if v.field.iter().any(|e| !e.is_finite()) {
                return Err(Error::invalid("field", format!("non-finite value at {:?}", v.index)));
            }
            check_permittivity(&v.permittivity).map_err(|reason| {
                Error::invalid("permittivity", format!("{reason} at {:?}", v.index))
            })?;
        }
        voxels.sort_by_key(|v| v.index);
        if let Some(w) = voxels.windows(2).find(|w| w[0].index == w[1].index) {
            return Err(Error::invalid("index", format!("{:?} appears twice", w[0].index)));
        }
        Ok(Self {
            shape,
            voxel_volume,
            voxels,
        })
    }

    /// Build a grid by evaluating `f` at every index.
    pub fn from_fn(
        shape: [usize; 3],
        voxel_volume: f64,
        mut f: impl FnMut([usize; 3]) -> VoxelData,
    ) -> Result<Self> {
        let mut voxels = Vec::with_capacity(shape.iter().product());
        for i in 0..shape[0] {
            for j in 0..shape[1] {
                for k in 0..shape[2] {
                    let index = [i, j, k];
                    let d = f(index);
                    voxels.push(Voxel {
                        index,
                        field: d.field,
                        permittivity: d.permittivity,
                        in_eo_region: d.in_eo_region,
                    });
                }
            }
        }
        Self::new(shape, voxel_volume, voxels)
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn voxel_volume(&self) -> f64 {
        self.voxel_volume
    }

    pub fn voxels(&self) -> &[Voxel] {
        &self.voxels
    }

    pub fn masked_count(&self) -> usize {
        self.voxels.iter().filter(|v| v.in_eo_region).count()
    }

    /// Copy with every field value multiplied by `s`.
    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.voxels {
            for e in &mut v.field {
                *e *= s;
            }
        }
        out
    }
}

fn check_permittivity(eps: &[[f64; 3]; 3]) -> std::result::Result<(), &'static str> {
    if eps.iter().flatten().any(|x| !x.is_finite()) {
        return Err("non-finite permittivity");
    }
    let scale = eps.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
    for i in 0..3 {
        for j in 0..i {
            if (eps[i][j] - eps[j][i]).abs() > 1e-12 * scale {
                return Err("permittivity not symmetric");
            }
        }
    }
    // Sylvester's criterion
    let m1 = eps[0][0];
    let m2 = eps[0][0] * eps[1][1] - eps[0][1] * eps[1][0];
    let m3 = eps[0][0] * (eps[1][1] * eps[2][2] - eps[1][2] * eps[2][1])
        - eps[0][1] * (eps[1][0] * eps[2][2] - eps[1][2] * eps[2][0])
        + eps[0][2] * (eps[1][0] * eps[2][1] - eps[1][1] * eps[2][0]);
    if m1 > 0.0 && m2 > 0.0 && m3 > 0.0 {
        Ok(())
    } else {
        Err("permittivity not positive definite")
    }
}

/// Diagonal permittivity tensor.
pub fn diagonal_permittivity(eps: [f64; 3]) -> [[f64; 3]; 3] {
    [[eps[0], 0.0, 0.0], [0.0, eps[1], 0.0], [0.0, 0.0, eps[2]]]
}

/// Linear electro-optic tensor r_ijk (m/V), symmetric in its first two indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EoTensor {
    r: [[[f64; 3]; 3]; 3],
}

/// Contracted index I (0-based) to the symmetric pair (i, j).
const CONTRACTED: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

impl EoTensor {
    pub fn new(r: [[[f64; 3]; 3]; 3]) -> Result<Self> {
        let scale = r.iter().flatten().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let x = r[i][j][k];
                    if !x.is_finite() {
                        return Err(Error::invalid("r", "non-finite entry"));
                    }
                    if (x - r[j][i][k]).abs() > 1e-12 * scale {
                        return Err(Error::invalid("r", format!("r[{i}][{j}][{k}] != r[{j}][{i}][{k}]")));
                    }
                }
            }
        }
        Ok(Self { r })
    }

    /// From contracted-notation rows `r_Ik`, with I = 1..6 mapping to
    /// xx, yy, zz, yz, xz, xy.
    pub fn from_contracted(rc: [[f64; 3]; 6]) -> Result<Self> {
        let mut r = [[[0.0; 3]; 3]; 3];
        for (row, &(i, j)) in rc.iter().zip(&CONTRACTED) {
            r[i][j] = *row;
            r[j][i] = *row;
        }
        Self::new(r)
    }

    /// Only r₃₃ = r_zzz populated.
    pub fn r33_only(r33: f64) -> Self {
        let mut r = [[[0.0; 3]; 3]; 3];
        r[2][2][2] = r33;
        Self { r }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.r[i][j][k]
    }
}

/// Second-order susceptibility χ⁽²⁾_ijk (m/V).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi2Tensor {
    pub chi: [[[f64; 3]; 3]; 3],
}

impl Chi2Tensor {
    /// χ⁽²⁾_ijk = ε_ii ε_jj r_ijk / 2 for a material with diagonal relative
    /// permittivity `eps_diag`.
    pub fn from_eo(r: &EoTensor, eps_diag: [f64; 3]) -> Self {
        let mut chi = [[[0.0; 3]; 3]; 3];
        for (i, plane) in chi.iter_mut().enumerate() {
            for (j, row) in plane.iter_mut().enumerate() {
                for (k, x) in row.iter_mut().enumerate() {
                    *x = eps_diag[i] * eps_diag[j] * r.get(i, j, k) / 2.0;
                }
            }
        }
        Self { chi }
    }
}

/// The three mode profiles and their angular frequencies.
#[derive(Debug, Clone, Copy)]
pub struct OverlapInputs<'a> {
    pub a: &'a FieldGrid,
    pub b: &'a FieldGrid,
    pub c: &'a FieldGrid,
    pub omega_a: f64,
    pub omega_b: f64,
    pub omega_c: f64,
}

/// Complex coupling rate, reported as magnitude (rad/s) and phase (rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G0Overlap {
    pub magnitude: f64,
    pub phase: f64,
}

impl G0Overlap {
    fn from_complex(z: Complex64) -> Self {
        Self {
            magnitude: z.norm(),
            phase: if z == Complex64::new(0.0, 0.0) { 0.0 } else { z.arg() },
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

/// Neumaier compensated sum.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

fn compensated_complex(values: impl Iterator<Item = Complex64>) -> Complex64 {
    let (mut re, mut im) = (Compensated::default(), Compensated::default());
    for z in values {
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.total(), im.total())
}

/// Deterministic parallel sum of `term` over voxel positions `0..n`.
fn voxel_sum(n: usize, term: impl Fn(usize) -> Complex64 + Sync) -> Complex64 {
    let starts: Vec<usize> = (0..n).step_by(CHUNK).collect();
    let partials: Vec<Complex64> = starts
        .par_iter()
        .map(|&s| compensated_complex((s..(s + CHUNK).min(n)).map(&term)))
        .collect();
    compensated_complex(partials.into_iter())
}

/// Zero-point normalization N_m of one mode profile.
pub fn normalization_constant(grid: &FieldGrid, omega: f64) -> Result<f64> {
    let v = grid.voxels();
    let energy = voxel_sum(v.len(), |n| {
        let (e, eps) = (&v[n].field, &v[n].permittivity);
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                s += eps[i][j] * e[i] * e[j].conj();
            }
        }
        s
    })
    .re * grid.voxel_volume();
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::domain(format!("field energy must be > 0, got {energy}")));
    }
    Ok((HBAR * omega / (2.0 * EPSILON_0 * energy)).sqrt())
}

fn check_layout(inputs: &OverlapInputs) -> Result<()> {
    let a = inputs.a;
    for (name, g) in [("b", inputs.b), ("c", inputs.c)] {
        if g.shape() != a.shape() {
            return Err(Error::GridMismatch(format!(
                "mode {name} has shape {:?}, mode a has {:?}",
                g.shape(),
                a.shape()
            )));
        }
        if (g.voxel_volume() - a.voxel_volume()).abs() > 1e-12 * a.voxel_volume() {
            return Err(Error::GridMismatch(format!(
                "mode {name} voxel volume {:e} differs from mode a {:e}",
                g.voxel_volume(),
                a.voxel_volume()
            )));
        }
        if let Some(v) = g.voxels().iter().zip(a.voxels()).find(|(x, y)| x.in_eo_region != y.in_eo_region) {
            return Err(Error::GridMismatch(format!(
                "mode {name} region mask differs from mode a at {:?}",
                v.0.index
            )));
        }
    }
    if a.masked_count() == 0 {
        return Err(Error::domain("no voxel is flagged as electro-optic material"));
    }
    Ok(())
}

/// Shared driver: `coeff(voxel_of_a, i, j, k)` supplies the tensor weight.
fn overlap(inputs: &OverlapInputs, prefactor: f64, coeff: impl Fn(&Voxel, usize, usize, usize) -> f64 + Sync) -> Result<G0Overlap> {
    check_layout(inputs)?;
    let norm = normalization_constant(inputs.a, inputs.omega_a)?
        * normalization_constant(inputs.b, inputs.omega_b)?
        * normalization_constant(inputs.c, inputs.omega_c)?;
    let (va, vb, vc) = (inputs.a.voxels(), inputs.b.voxels(), inputs.c.voxels());
    let sum = voxel_sum(va.len(), |n| {
        let a = &va[n];
        if !a.in_eo_region {
            return Complex64::new(0.0, 0.0);
        }
        let (ea, eb, ec) = (&a.field, &vb[n].field, &vc[n].field);
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                let ab = ea[i] * eb[j].conj();
                for k in 0..3 {
                    let w = coeff(a, i, j, k);
                    if w != 0.0 {
                        s += w * ab * ec[k];
                    }
                }
            }
        }
        s
    });
    let hbar_g0 = prefactor * EPSILON_0 * norm * inputs.a.voxel_volume() * sum;
    Ok(G0Overlap::from_complex(hbar_g0 / HBAR))
}

/// Full tensor overlap with the linear electro-optic tensor.
pub fn g0_overlap_full(inputs: &OverlapInputs, r: &EoTensor) -> Result<G0Overlap> {
    overlap(inputs, 1.0, |v, i, j, k| {
        v.permittivity[i][i] * v.permittivity[j][j] * r.get(i, j, k)
    })
}

/// Overlap keeping only the z components and r₃₃, with extraordinary index `n_e`.
pub fn g0_overlap_r33(inputs: &OverlapInputs, n_e: f64, r33: f64) -> Result<G0Overlap> {
    if !(n_e.is_finite() && n_e > 0.0) {
        return Err(Error::invalid("n_e", format!("must be > 0, got {n_e}")));
    }
    let w = n_e.powi(4) * r33;
    overlap(inputs, 1.0, move |_, i, j, k| if i == 2 && j == 2 && k == 2 { w } else { 0.0 })
}

/// Overlap written with the second-order susceptibility.
pub fn g0_overlap_chi2(inputs: &OverlapInputs, chi2: &Chi2Tensor) -> Result<G0Overlap> {
    overlap(inputs, 2.0, |_, i, j, k| chi2.chi[i][j][k])
}

/// Lumped microwave resonator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    /// Total capacitance (F).
    pub c_total: f64,
    /// Characteristic impedance (Ω).
    pub impedance: f64,
    /// Resonance (rad/s).
    pub omega_c: f64,
}

impl CircuitParams {
    pub fn new(c_total: f64, impedance: f64, omega_c: f64) -> Result<Self> {
        for (field, v) in [("c_total", c_total), ("impedance", impedance), ("omega_c", omega_c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be > 0, got {v}")));
            }
        }
        Ok(Self {
            c_total,
            impedance,
            omega_c,
        })
    }

    /// Capacitance implied by the impedance, C = 1/(Zω_c).
    pub fn from_impedance(impedance: f64, omega_c: f64) -> Result<Self> {
        Self::new(1.0 / (impedance * omega_c), impedance, omega_c)
    }

    /// Relative mismatch |Z − 1/(ω_c C)| / Z.
    pub fn impedance_mismatch(&self) -> f64 {
        (self.impedance - 1.0 / (self.omega_c * self.c_total)).abs() / self.impedance
    }

    /// False when impedance and capacitance disagree by more than 10%.
    pub fn is_consistent(&self) -> bool {
        self.impedance_mismatch() <= 0.1
    }
}

/// Root-mean-square vacuum voltage √(ħω_c / 2C).
pub fn zero_point_voltage(circuit: &CircuitParams) -> f64 {
    (HBAR * circuit.omega_c / (2.0 * circuit.c_total)).sqrt()
}

/// g₀ = (3/2) g_V V_zp, with `g_v` the optical tuning rate per volt (rad/s/V).
pub fn g0_from_gv(g_v: f64, v_zp: f64) -> f64 {
    1.5 * g_v * v_zp
}

/// Inverse of [`g0_from_gv`].
pub fn gv_from_g0(g0: f64, v_zp: f64) -> f64 {
    g0 / (1.5 * v_zp)
}
