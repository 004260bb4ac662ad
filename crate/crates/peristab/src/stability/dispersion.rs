//! Plane-wave dispersion analysis of a 1D hyperelastic bar.
//!
//! A perturbation u = u0 exp(i(kX - wt)) is inserted into the 1D force state
//! and the equation of motion is evaluated at X = 0, t = 0 with a Hookean
//! classical law S = E0 * E_(m). The right side is nonlinear in u0, so the
//! real part defines omega^2 and the imaginary remainder is reported as a
//! diagnostic.

use crate::error::{Error, Result};
use crate::exec;
use crate::kinematics::SethHill;
use num_complex::Complex64;

/// One dispersion sample: omega^2 plus the imaginary residual left after the
/// real-part projection (relative magnitude diagnostic).
#[derive(Debug, Clone, Copy)]
pub struct DispersionPoint {
    pub k: f64,
    pub omega2: f64,
    pub imag_residual: f64,
}

fn ratio2(y: Complex64, xi: f64) -> Complex64 {
    (y / xi) * (y / xi)
}

fn pow_c(z: Complex64, m: f64) -> Complex64 {
    if m == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if m == 1.0 {
        z
    } else {
        z.powf(m)
    }
}

/// Complex deformed bond Y[xi][X] = xi + u0 e^(ikX) (e^(ik xi) - 1) at t = 0.
fn deformed(xi: f64, x: f64, k: f64, u0: f64) -> Complex64 {
    let phase = Complex64::new(0.0, k * x).exp();
    let shift = Complex64::new(0.0, k * xi).exp() - 1.0;
    Complex64::new(xi, 0.0) + u0 * phase * shift
}

/// Nonlocal Seth-Hill strain of the perturbed bar at position `x`,
/// evaluated by discrete quadrature over the horizon (N nodes per horizon).
fn strain_at(x: f64, k: f64, u0: f64, m: SethHill, n: usize, dx: f64) -> Result<Complex64> {
    let omega0 = 2.0 * n as f64 * dx; // 1D shape tensor: sum of omega dV
    let mut acc = Complex64::new(0.0, 0.0);
    for p in (-(n as i64)..=n as i64).filter(|&p| p != 0) {
        let xi = p as f64 * dx;
        let y = deformed(xi, x, k, u0);
        let r2 = ratio2(y, xi);
        if r2.norm() < 1e-20 {
            return Err(Error::CollapsedBond {
                node: 0,
                neighbor: p.unsigned_abs() as usize,
                ratio: r2.norm().sqrt(),
            });
        }
        if m.is_log() {
            acc += 0.5 * r2.ln() * dx;
        } else {
            acc += pow_c(r2, m.0) * dx;
        }
    }
    if m.is_log() {
        Ok(acc / omega0)
    } else {
        Ok((acc / omega0 - 1.0) / (2.0 * m.0))
    }
}

/// Squared angular frequency of the perturbed bar at X = 0, t = 0.
/// Returns exactly zero at k = 0 (rigid translation).
pub fn dispersion_omega2(
    k: f64,
    u0: f64,
    m: SethHill,
    n: usize,
    dx: f64,
    e0: f64,
    rho0: f64,
) -> Result<DispersionPoint> {
    if u0 == 0.0 {
        return Err(Error::ContractViolation("u0 must be nonzero".into()));
    }
    let omega0 = 2.0 * n as f64 * dx;
    let s0 = e0 * strain_at(0.0, k, u0, m, n, dx)?;
    let mut rhs = Complex64::new(0.0, 0.0);
    for p in (-(n as i64)..=n as i64).filter(|&p| p != 0) {
        let xi = p as f64 * dx;
        let y = deformed(xi, 0.0, k, u0);
        let r2 = ratio2(y, xi);
        if r2.norm() < 1e-20 {
            return Err(Error::CollapsedBond {
                node: 0,
                neighbor: p.unsigned_abs() as usize,
                ratio: r2.norm().sqrt(),
            });
        }
        let s_far = e0 * strain_at(xi, k, u0, m, n, dx)?;
        rhs += (s0 + s_far) * pow_c(r2, m.0 - 1.0) * y / (xi * xi) * dx / omega0;
    }
    let omega2 = -rhs.re / (rho0 * u0);
    let imag_residual = (rhs.im / (rho0 * u0)).abs();
    Ok(DispersionPoint {
        k,
        omega2,
        imag_residual,
    })
}

/// Samples a dispersion curve over `ks` (parallel over samples).
pub fn dispersion_curve(
    ks: &[f64],
    u0: f64,
    m: SethHill,
    n: usize,
    dx: f64,
    e0: f64,
    rho0: f64,
) -> Result<Vec<DispersionPoint>> {
    exec::try_map_indexed(ks.len(), |i| {
        if ks[i] == 0.0 {
            Ok(DispersionPoint {
                k: 0.0,
                omega2: 0.0,
                imag_residual: 0.0,
            })
        } else {
            dispersion_omega2(ks[i], u0, m, n, dx, e0, rho0)
        }
    })
}

/// Interior sample indices where omega^2 reaches zero: either a sign change
/// between neighbors or a dip below `rel_tol` times the curve maximum (the
/// small-u0 zero-energy modes touch zero quadratically rather than crossing).
pub fn interior_zeros(points: &[DispersionPoint], rel_tol: f64) -> Vec<f64> {
    let max = points
        .iter()
        .map(|p| p.omega2.abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut zeros = Vec::new();
    for w in 1..points.len().saturating_sub(1) {
        let (prev, here, next) = (&points[w - 1], &points[w], &points[w + 1]);
        let crossing = here.omega2 * next.omega2 < 0.0;
        let touch = here.omega2.abs() <= rel_tol * max
            && here.omega2.abs() <= prev.omega2.abs()
            && here.omega2.abs() <= next.omega2.abs();
        if crossing || touch {
            zeros.push(here.k);
        }
    }
    zeros
}

#[cfg(test)]
mod tests {
    use super::*;

    const E0: f64 = 1.0;
    const RHO0: f64 = 1.0;

    #[test]
    fn rigid_translation_has_zero_frequency() {
        let pts = dispersion_curve(&[0.0], 1e-8, SethHill(1.0), 3, 0.1, E0, RHO0).unwrap();
        assert_eq!(pts[0].omega2, 0.0);
    }

    #[test]
    fn long_wave_limit_recovers_bar_sound_speed() {
        let dx = 0.1;
        let k = 0.02 / dx; // k * dx = 0.02
        for m in [0.0, 0.5, 1.0] {
            let p = dispersion_omega2(k, 1e-9 * dx, SethHill(m), 3, dx, E0, RHO0).unwrap();
            let c2 = p.omega2 / (k * k);
            assert!(
                (c2 - E0 / RHO0).abs() < 1e-3 * E0 / RHO0,
                "m = {m}: c^2 = {c2}"
            );
        }
    }

    #[test]
    fn pi_mode_matches_hand_derived_value_for_m1() {
        // at k dx = pi, m = 1, N = 3 the sums collapse to
        // omega^2 = (800/729) E0 u0^2 / (rho0 dx^4)
        let dx = 0.25;
        let u0 = 0.01 * dx;
        let p = dispersion_omega2(
            std::f64::consts::PI / dx,
            u0,
            SethHill(1.0),
            3,
            dx,
            E0,
            RHO0,
        )
        .unwrap();
        let expect = 800.0 / 729.0 * E0 * u0 * u0 / (RHO0 * dx.powi(4));
        assert!(
            (p.omega2 - expect).abs() < 1e-10 * expect,
            "{} vs {}",
            p.omega2,
            expect
        );
        assert!(p.imag_residual < 1e-12 * expect.max(1.0));
    }

    #[test]
    fn small_u0_curves_touch_zero_inside_the_band() {
        let dx = 0.2;
        let n_samples = 400;
        let ks: Vec<f64> = (0..=n_samples)
            .map(|i| 2.0 * std::f64::consts::PI / dx * i as f64 / n_samples as f64)
            .collect();
        for m in [0.0, 0.5, 1.0] {
            let pts =
                dispersion_curve(&ks, 1e-8 * dx, SethHill(m), 3, dx, E0, RHO0).unwrap();
            let zeros = interior_zeros(&pts, 1e-9);
            assert!(
                !zeros.is_empty(),
                "m = {m}: no interior zero-frequency mode found"
            );
            // the N = 3 zero-energy mode sits at k dx = pi
            assert!(
                zeros
                    .iter()
                    .any(|&k| (k * dx - std::f64::consts::PI).abs() < 0.1),
                "m = {m}: zeros at {zeros:?}"
            );
        }
    }
}
