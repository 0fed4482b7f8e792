//! Mean-field steady state of the three driven modes.
//!
//! With time derivatives set to zero the equations of motion read
//!
//! ```text
//! 0 = D_a a            − i ε_p
//! 0 = D_b b − i g0 a c
//! 0 = D_c c − i g0 a* b − i ε_µ      (conversion backaction term optional)
//! ```
//!
//! where `D_m = −iΔ_m − κ_m/2`. The pump-depletion term `−i g0 b c*` of the
//! mode-a equation is dropped in both variants. Without backaction the system
//! is triangular and solved directly. With backaction `c` is found by damped
//! fixed-point iteration on the c equation, falling back to the analytic
//! linear solve when the iteration stalls or diverges.

use num_complex::Complex64;

use super::OperatingPoint;
use crate::error::{Error, Result};
use crate::params::DeviceParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Whether the `−i g0 a* b` term feeds converted light back into mode c.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backaction {
    Excluded,
    Included,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Convergence threshold on the relative residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Relaxation factor in (0, 1]; 1 is the undamped iteration.
    pub damping: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 10_000,
            damping: 0.7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateSolution {
    /// Intracavity amplitudes, in √photons.
    pub amp_a: Complex64,
    pub amp_b: Complex64,
    pub amp_c: Complex64,
    pub converged: bool,
    /// Largest per-equation residual, each normalized by the magnitude of
    /// the terms in that equation.
    pub residual: f64,
    pub iterations: usize,
    /// True when the iteration was abandoned for the direct linear solve.
    pub used_linear_fallback: bool,
}

impl SteadyStateSolution {
    /// η = κ_{b,e}|b|² / (|ε_µ|²/κ_{c,e}); `None` without microwave drive.
    pub fn efficiency(&self, params: &DeviceParams, op: &OperatingPoint) -> Option<f64> {
        let eps_mu = op.microwave.amplitude(params.kappa_c_e());
        if eps_mu == 0.0 {
            return None;
        }
        let out = params.kappa_b_e() * self.amp_b.norm_sqr();
        let input = eps_mu * eps_mu / params.kappa_c_e();
        Some(out / input)
    }
}

struct System {
    d_a: Complex64,
    d_b: Complex64,
    d_c: Complex64,
    g0: f64,
    eps_p: f64,
    eps_mu: f64,
    backaction: bool,
}

impl System {
    fn new(params: &DeviceParams, op: &OperatingPoint, backaction: Backaction) -> Self {
        let d = &op.detunings;
        Self {
            d_a: Complex64::new(-0.5 * params.kappa_a(), -d.delta_a),
            d_b: Complex64::new(-0.5 * params.kappa_b(), -d.delta_b),
            d_c: Complex64::new(-0.5 * params.kappa_c(), -d.delta_c),
            g0: params.g0(),
            eps_p: op.pump.amplitude(params.kappa_a_e()),
            eps_mu: op.microwave.amplitude(params.kappa_c_e()),
            backaction: backaction == Backaction::Included,
        }
    }

    fn b_of(&self, a: Complex64, c: Complex64) -> Complex64 {
        I * self.g0 * a * c / self.d_b
    }

    /// Right-hand side of the c equation solved for c.
    fn c_update(&self, a: Complex64, b: Complex64) -> Complex64 {
        let mut rhs = I * self.eps_mu;
        if self.backaction {
            rhs += I * self.g0 * a.conj() * b;
        }
        rhs / self.d_c
    }

    fn residual(&self, a: Complex64, b: Complex64, c: Complex64) -> f64 {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return f64::INFINITY;
        }
        fn rel(terms: &[Complex64]) -> f64 {
            let sum: Complex64 = terms.iter().sum();
            let scale: f64 = terms.iter().map(|t| t.norm()).sum();
            if scale == 0.0 {
                0.0
            } else {
                sum.norm() / scale
            }
        }
        let ra = rel(&[self.d_a * a, -I * self.eps_p]);
        let rb = rel(&[self.d_b * b, -I * self.g0 * a * c]);
        let back = if self.backaction {
            -I * self.g0 * a.conj() * b
        } else {
            Complex64::new(0.0, 0.0)
        };
        let rc = rel(&[self.d_c * c, back, -I * self.eps_mu]);
        ra.max(rb).max(rc)
    }
}

/// Solve for the steady-state mean fields.
pub fn steady_state_solve(
    params: &DeviceParams,
    op: &OperatingPoint,
    backaction: Backaction,
    options: SolverOptions,
) -> Result<SteadyStateSolution> {
    if !(options.damping > 0.0 && options.damping <= 1.0) {
        return Err(Error::Usage(format!("damping must lie in (0, 1], got {}", options.damping)));
    }
    let sys = System::new(params, op, backaction);
    let a = I * sys.eps_p / sys.d_a;

    if !sys.backaction {
        let c = sys.c_update(a, Complex64::new(0.0, 0.0));
        let b = sys.b_of(a, c);
        let residual = sys.residual(a, b, c);
        return finish(a, b, c, residual, 0, false, options);
    }

    let lambda = options.damping;
    let mut c = sys.d_c.inv() * I * sys.eps_mu;
    let mut b = sys.b_of(a, c);
    let mut residual = sys.residual(a, b, c);
    let mut iterations = 0;
    while residual > options.tolerance && iterations < options.max_iterations {
        let c_next = sys.c_update(a, b);
        c = (1.0 - lambda) * c + lambda * c_next;
        b = sys.b_of(a, c);
        let r = sys.residual(a, b, c);
        iterations += 1;
        residual = r;
        if !r.is_finite() {
            // diverged to inf/NaN
            break;
        }
    }
    if residual <= options.tolerance {
        return finish(a, b, c, residual, iterations, false, options);
    }

    // c = iε_µ / (D_c + G²/D_b), from substituting b(c) into the c equation.
    let g2 = sys.g0 * sys.g0 * a.norm_sqr();
    let c = I * sys.eps_mu / (sys.d_c + g2 / sys.d_b);
    let b = sys.b_of(a, c);
    let residual = sys.residual(a, b, c);
    finish(a, b, c, residual, iterations, true, options)
}

fn finish(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    residual: f64,
    iterations: usize,
    used_linear_fallback: bool,
    options: SolverOptions,
) -> Result<SteadyStateSolution> {
    // allow a few ulps of slack over the requested tolerance for the direct solves
    if !residual.is_finite() || residual > options.tolerance.max(8.0 * f64::EPSILON) {
        return Err(Error::SolverDiverged { iterations, residual });
    }
    Ok(SteadyStateSolution {
        amp_a: a,
        amp_b: b,
        amp_c: c,
        converged: true,
        residual,
        iterations,
        used_linear_fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transduction::{efficiency_full, efficiency_low_c, DetuningSet};
    use approx::assert_relative_eq;

    #[test]
    fn no_backaction_matches_low_c_closed_form() {
        let p = DeviceParams::reference();
        let op = OperatingPoint::resonant(&p, 1e-6, 1e-9).unwrap();
        let s = steady_state_solve(&p, &op, Backaction::Excluded, SolverOptions::default()).unwrap();
        assert!(s.converged);
        assert_relative_eq!(s.efficiency(&p, &op).unwrap(), efficiency_low_c(&p, &op), max_relative = 1e-9);
    }

    #[test]
    fn backaction_matches_full_closed_form() {
        let p = DeviceParams::reference();
        let op = OperatingPoint::resonant(&p, 1e-6, 1e-9).unwrap().with_detunings(DetuningSet {
            delta_a: 1e8,
            delta_b: -3e8,
            delta_c: 2e7,
        });
        let s = steady_state_solve(&p, &op, Backaction::Included, SolverOptions::default()).unwrap();
        assert!(!s.used_linear_fallback);
        assert_relative_eq!(s.efficiency(&p, &op).unwrap(), efficiency_full(&p, &op).efficiency, max_relative = 1e-9);
    }

    #[test]
    fn high_cooperativity_uses_fallback() {
        let p = DeviceParams::reference();
        // C ≈ 5e-7 per µW, so 100 W gives C ≈ 50 and the damped iteration diverges
        let op = OperatingPoint::resonant(&p, 100.0, 1e-9).unwrap();
        let s = steady_state_solve(&p, &op, Backaction::Included, SolverOptions::default()).unwrap();
        assert!(s.used_linear_fallback);
        assert_relative_eq!(s.efficiency(&p, &op).unwrap(), efficiency_full(&p, &op).efficiency, max_relative = 1e-9);
    }

    #[test]
    fn zero_drives_give_zero_fields() {
        let p = DeviceParams::reference();
        let op = OperatingPoint::resonant(&p, 0.0, 0.0).unwrap();
        for mode in [Backaction::Excluded, Backaction::Included] {
            let s = steady_state_solve(&p, &op, mode, SolverOptions::default()).unwrap();
            assert_eq!(s.amp_a.norm(), 0.0);
            assert_eq!(s.amp_b.norm(), 0.0);
            assert_eq!(s.amp_c.norm(), 0.0);
            assert!(s.efficiency(&p, &op).is_none());
        }
    }

    #[test]
    fn bad_damping_rejected() {
        let p = DeviceParams::reference();
        let op = OperatingPoint::resonant(&p, 1e-6, 1e-9).unwrap();
        let opts = SolverOptions {
            damping: 0.0,
            ..Default::default()
        };
        assert!(steady_state_solve(&p, &op, Backaction::Included, opts).is_err());
    }
}
