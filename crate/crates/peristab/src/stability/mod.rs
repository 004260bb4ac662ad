//! Material-stability machinery for the correspondence models: analytic
//! Jacobian diagonal blocks, a finite-difference Jacobian oracle, the
//! hydrostatic indicator Gamma(m) and its critical exponent, discrete 1D/2D
//! criteria with lattice-sum verification, the perturbation energy test, and
//! dispersion analysis.

pub mod dispersion;
pub mod lattice;

use crate::error::{Error, Result};
use crate::exec;
use crate::kinematics::{self, deformed_bonds, pow_ratio, SethHill};
use crate::linalg::{self, Mat};
use crate::material::{self, Body, ModelFamily};
use crate::mesh::InfluenceSpec;
use crate::quad::adaptive_simpson;
use crate::tensor::{Tensor2, Tensor4};

/// Relative inner cutoff for the radial quadratures: the 1D and 2D step-
/// influence integrands (omega/r^2, omega/r) diverge at r -> 0, where a
/// discretization has a natural dX cutoff anyway. Sign and the zero at m_cr
/// are cutoff-independent.
pub const RADIAL_CUTOFF_REL: f64 = 1e-6;

const QUAD_TOL: f64 = 1e-10;

/// Critical Seth-Hill exponent at which Gamma vanishes: 1/2 in 1D, 0 in 2D
/// and 3D.
pub fn m_critical(dim: usize) -> f64 {
    match dim {
        1 => 0.5,
        2 | 3 => 0.0,
        _ => panic!("dim must be 1, 2, or 3"),
    }
}

/// Hydrostatic stability indicator Gamma(m) for a spherical influence
/// function, by adaptive radial quadrature of the per-dimension angular
/// reductions:
///
/// ```text
/// 1D: (2m - 1) * (2/V)  * integral omega(r)/r^2 dr
/// 2D: (4 pi m / V)      * integral omega(r)/r   dr
/// 3D: (8 pi m / V)      * integral omega(r)     dr
/// ```
///
/// with V the weighted volume. The closed forms for the step influence
/// follow by inserting omega = 1.
pub fn gamma_m(m: f64, dim: usize, infl: &InfluenceSpec) -> f64 {
    let delta = infl.horizon;
    let r0 = RADIAL_CUTOFF_REL * delta;
    let w = |r: f64| infl.weight(r);
    let prefactor = match dim {
        1 => 2.0 * (2.0 * m - 1.0),
        2 => 4.0 * std::f64::consts::PI * m,
        3 => 8.0 * std::f64::consts::PI * m,
        _ => panic!("dim must be 1, 2, or 3"),
    };
    if prefactor == 0.0 {
        return 0.0;
    }
    // the cutoff applies only to the singular radial weights (1/r^2, 1/r)
    let v_omega = match dim {
        1 => 2.0 * adaptive_simpson(&w, 0.0, delta, QUAD_TOL),
        2 => 2.0 * std::f64::consts::PI * adaptive_simpson(&|r| w(r) * r, 0.0, delta, QUAD_TOL),
        _ => {
            4.0 * std::f64::consts::PI * adaptive_simpson(&|r| w(r) * r * r, 0.0, delta, QUAD_TOL)
        }
    };
    let radial = match dim {
        1 => adaptive_simpson(&|r| w(r) / (r * r), r0, delta, QUAD_TOL),
        2 => adaptive_simpson(&|r| w(r) / r, r0, delta, QUAD_TOL),
        _ => adaptive_simpson(&w, 0.0, delta, QUAD_TOL),
    };
    prefactor * radial / v_omega
}

/// Discrete 1D hydrostatic stability criterion for N nodes per horizon:
/// the state (m, a) is stable iff the Jacobian-diagonal bracket is positive.
pub fn stable_1d(m: SethHill, a: f64, n: usize) -> bool {
    debug_assert!(a > -1.0 && n >= 1);
    let nn = n as f64;
    if m.is_log() {
        (1.0 + a).ln() < 1.0 / (4.0 * nn)
    } else {
        let q = (2.0 * m.0 - 1.0) / (2.0 * m.0);
        (1.0 / (4.0 * nn) + q) * pow_ratio(1.0 + a, 2.0 * m.0) > q
    }
}

/// Strain at which the 1D bracket changes sign, when a boundary exists in
/// a > -1. Compression boundary for m > 1/2, tension boundary for m < 1/2.
pub fn critical_strain_1d(m: SethHill, n: usize) -> Option<f64> {
    let nn = n as f64;
    if m.is_log() {
        return Some((1.0 / (4.0 * nn)).exp() - 1.0);
    }
    let q = (2.0 * m.0 - 1.0) / (2.0 * m.0);
    let denom = q + 1.0 / (4.0 * nn);
    if q == 0.0 {
        return None;
    }
    let ratio = q / denom;
    if !(ratio > 0.0) || !ratio.is_finite() {
        return None;
    }
    Some(ratio.powf(1.0 / (2.0 * m.0)) - 1.0)
}

/// Closed-form 1D Jacobian diagonal at a uniform hydrostatic state on a grid
/// with N nodes per horizon (hydrostatic-linear law with constant kappa).
pub fn df1d_closed_form(m: SethHill, a: f64, n: usize, kappa: f64, dx: f64) -> f64 {
    let nn = n as f64;
    let sum_p2: f64 = (1..=n).map(|p| 1.0 / (p * p) as f64).sum();
    let bracket = if m.is_log() {
        1.0 / (4.0 * nn) - (1.0 + a).ln()
    } else {
        let q = (2.0 * m.0 - 1.0) / (2.0 * m.0);
        pow_ratio(1.0 + a, 2.0 * m.0) / (4.0 * nn) + q * (pow_ratio(1.0 + a, 2.0 * m.0) - 1.0)
    };
    -2.0 * kappa * pow_ratio(1.0 + a, 2.0 * m.0 - 2.0) / (nn * dx * dx) * sum_p2 * bracket
}

/// Eigenvalues of the 2D hydrostatic Jacobian diagonal block (both equal):
/// lambda = -(4 (4 + pi ln N) / (pi^2 N^2 dX^2)) kappa (1+a)^(4m-2) * bracket,
/// bracket = 1 + 2 pi N (1 - (1+a)^(-2m)), or 1 + 2 pi N ln(1+a) at m = 0.
pub fn eig_2d_hydro(m: SethHill, a: f64, n: usize, kappa: f64, dx: f64) -> (f64, f64) {
    debug_assert!(a > -1.0);
    let nn = n as f64;
    let pi = std::f64::consts::PI;
    let prefactor = -4.0 * (4.0 + pi * nn.ln()) / (pi * pi * nn * nn * dx * dx)
        * kappa
        * pow_ratio(1.0 + a, 4.0 * m.0 - 2.0);
    let bracket = bracket_2d(m, a, n);
    let lam = prefactor * bracket;
    (lam, lam)
}

fn bracket_2d(m: SethHill, a: f64, n: usize) -> f64 {
    let two_pi_n = 2.0 * std::f64::consts::PI * n as f64;
    if m.is_log() {
        1.0 + two_pi_n * (1.0 + a).ln()
    } else {
        1.0 + two_pi_n * (1.0 - pow_ratio(1.0 + a, -2.0 * m.0))
    }
}

/// 2D hydrostatic stability from the eigenvalue sign: stable iff the bracket
/// is positive (so the eigenvalues are negative).
pub fn stable_2d(m: SethHill, a: f64, n: usize) -> bool {
    bracket_2d(m, a, n) > 0.0
}

/// 2D hydrostatic diagonal obtained by carrying the lattice-sum reduction
/// through with consistent dV/V bookkeeping (spherical tangent convention):
///
/// ```text
/// lambda = -(4 (4 + pi ln N) / (pi^2 N^4 dX^2)) kappa (1+a)^(4m-2)
///          * [1 + pi N^2 (1 - (1+a)^(-2m))]
/// ```
///
/// The m = 0 member keeps only the first term (the second is proportional
/// to m in 2D), so it stays negative for every hydrostatic strain. This is
/// the asymptotic target of the discrete bond-sum assembly; `eig_2d_hydro`
/// keeps the region-map bracket form.
pub fn eig_2d_hydro_reduced(m: SethHill, a: f64, n: usize, kappa: f64, dx: f64) -> f64 {
    let nn = n as f64;
    let pi = std::f64::consts::PI;
    let prefactor = -4.0 * (4.0 + pi * nn.ln()) / (pi * pi * nn.powi(4) * dx * dx)
        * kappa
        * pow_ratio(1.0 + a, 4.0 * m.0 - 2.0);
    let bracket = if m.is_log() {
        1.0
    } else {
        1.0 + pi * nn * nn * (1.0 - pow_ratio(1.0 + a, -2.0 * m.0))
    };
    prefactor * bracket
}

/// Root of the 2D bracket, when one exists in a > -1.
pub fn critical_strain_2d(m: SethHill, n: usize) -> Option<f64> {
    let two_pi_n = 2.0 * std::f64::consts::PI * n as f64;
    if m.is_log() {
        return Some((-1.0 / two_pi_n).exp() - 1.0);
    }
    let target = 1.0 + 1.0 / two_pi_n; // (1+a)^(-2m) at the root
    Some(target.powf(-1.0 / (2.0 * m.0)) - 1.0)
}

/// Full finite-difference Jacobian d f_k(X_I) / d x_l(X_J) over all nodes,
/// by central differences with step `eps`. Columns are independent and run
/// in parallel; the assembled matrix is deterministic.
pub fn jacobian_fd(body: &Body, positions: &[[f64; 3]], eps: f64) -> Result<Mat> {
    let dim = body.dim();
    let n = body.n_nodes();
    let ndof = n * dim;
    let cols: Vec<Vec<f64>> = exec::try_map_indexed(ndof, |col| {
        let (j, l) = (col / dim, col % dim);
        let mut pos = positions.to_vec();
        pos[j][l] = positions[j][l] + eps;
        let fp = body.internal_forces(&pos)?;
        pos[j][l] = positions[j][l] - eps;
        let fm = body.internal_forces(&pos)?;
        let mut column = vec![0.0; ndof];
        for i in 0..n {
            for k in 0..dim {
                column[i * dim + k] = (fp[i][k] - fm[i][k]) / (2.0 * eps);
            }
        }
        Ok::<_, Error>(column)
    })?;
    let mut jac = Mat::zeros(ndof, ndof);
    for (col, column) in cols.iter().enumerate() {
        for row in 0..ndof {
            jac.set(row, col, column[row]);
        }
    }
    Ok(jac)
}

/// Finite-difference diagonal block d f(X) / d x(X) at one node.
pub fn fd_diag_block(body: &Body, positions: &[[f64; 3]], node: usize, eps: f64) -> Result<Tensor2> {
    let dim = body.dim();
    let mut block = Tensor2::zeros(dim);
    for l in 0..dim {
        let mut pos = positions.to_vec();
        pos[node][l] = positions[node][l] + eps;
        let fp = body.internal_forces(&pos)?;
        pos[node][l] = positions[node][l] - eps;
        let fm = body.internal_forces(&pos)?;
        for k in 0..dim {
            block.set(k, l, (fp[node][k] - fm[node][k]) / (2.0 * eps));
        }
    }
    Ok(block)
}

fn homogeneity_check(
    body: &Body,
    node: usize,
    ys: &[[f64; 3]],
    f_bar: &Tensor2,
) -> Result<()> {
    let bonds = body.families.family(node);
    let scale = f_bar.norm_inf() * body.nodes.dx;
    for (b, y) in bonds.iter().zip(ys) {
        let fy = f_bar.mul_vec(&b.xi);
        for k in 0..body.dim() {
            if (y[k] - fy[k]).abs() > 1e-8 * scale.max(1e-300) {
                return Err(Error::ContractViolation(
                    "analytic diagonal block requires a homogeneous deformation state".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Analytic Jacobian diagonal block at a node of a homogeneous state of the
/// generalized model, as the discrete bond sum. The O(dV) first term (the
/// stress-coupling double integral collapsed to eta = 0) is included; the
/// remaining term is the one that survives the continuum limit. Matches the
/// finite-difference Jacobian diagonal.
pub fn diag_block_discrete(body: &Body, positions: &[[f64; 3]], node: usize) -> Result<Tensor2> {
    let dim = body.dim();
    let x = &body.nodes.positions[node];
    let moduli = material::moduli(&body.material.law, dim, x);
    diag_block_discrete_with_moduli(body, positions, node, &moduli)
}

/// Same bond-sum assembly with an explicit constitutive tangent, for
/// reproducing reduction chains that adopt a different tangent convention.
pub fn diag_block_discrete_with_moduli(
    body: &Body,
    positions: &[[f64; 3]],
    node: usize,
    moduli: &Tensor4,
) -> Result<Tensor2> {
    let m = match body.material.family {
        ModelFamily::Generalized(m) => m,
        ModelFamily::Silling => {
            return Err(Error::ContractViolation(
                "analytic diagonal block is derived for the generalized family".into(),
            ))
        }
    };
    let dim = body.dim();
    let bonds = body.families.family(node);
    let ys = deformed_bonds(node, bonds, positions);
    let geo = &body.geometry[node];
    let f_bar = kinematics::def_grad_bar(dim, bonds, &ys, &body.nodes.volumes, &geo.k_inv);
    homogeneity_check(body, node, &ys, &f_bar)?;

    let x = &body.nodes.positions[node];
    let strain = kinematics::seth_hill_strain(
        node,
        dim,
        bonds,
        &ys,
        &body.nodes.volumes,
        &geo.l_inv,
        m,
    )?;
    let stress = material::stress_generalized(&strain, &body.material.law, x)?;
    let kernel = geo.l_inv.double_contract(&stress)?; // G_pq = Linv_pqij S_ij

    // D_pqtu = Linv_pqij C_ijrs Linv_turs
    let mut d4 = Tensor4::zeros(dim);
    for p in 0..dim {
        for q in 0..dim {
            for t in 0..dim {
                for u in 0..dim {
                    let mut acc = 0.0;
                    for i in 0..dim {
                        for j in 0..dim {
                            for r in 0..dim {
                                for s in 0..dim {
                                    acc += geo.l_inv.get(p, q, i, j)
                                        * moduli.get(i, j, r, s)
                                        * geo.l_inv.get(t, u, r, s);
                                }
                            }
                        }
                    }
                    d4.set(p, q, t, u, acc);
                }
            }
        }
    }

    let dv_node = body.nodes.volumes[node];
    let mut block = Tensor2::zeros(dim);
    for (b, y) in bonds.iter().zip(&ys) {
        let dv = body.nodes.volumes[b.neighbor as usize];
        let y2: f64 = y.iter().map(|v| v * v).sum();
        let xi2 = b.len * b.len;
        let ratio2 = y2 / xi2;

        // first term: omega^2 (|Y|/|xi|)^(4m-2) (Y_k Y_l / |Y|^2)
        //             xi_p xi_q xi_t xi_u / |xi|^6 : D, times dV_I dV_J
        let mut s4 = 0.0;
        for p in 0..dim {
            for q in 0..dim {
                for t in 0..dim {
                    for u in 0..dim {
                        s4 += b.xi[p] * b.xi[q] * b.xi[t] * b.xi[u] * d4.get(p, q, t, u);
                    }
                }
            }
        }
        let w1 = b.weight * b.weight * pow_ratio(ratio2, 2.0 * m.0 - 1.0) * s4 / xi2.powi(3)
            * dv
            * dv_node;

        // second term: 2 omega (|Y|/|xi|)^(2m-2) (xi' G xi / |xi|^4)
        //              [2(m-1) Y_k Y_l / |Y|^2 + d_kl], times dV_J
        let gxi = kernel.mul_vec(&b.xi);
        let phi: f64 = (0..dim).map(|p| b.xi[p] * gxi[p]).sum::<f64>() / (xi2 * xi2);
        let w2 = 2.0 * b.weight * pow_ratio(ratio2, m.0 - 1.0) * phi * dv;

        for k in 0..dim {
            for l in 0..dim {
                let yy = y[k] * y[l] / y2;
                let eye = if k == l { 1.0 } else { 0.0 };
                let v = block.get(k, l) - w1 * yy - w2 * (2.0 * (m.0 - 1.0) * yy + eye);
                block.set(k, l, v);
            }
        }
    }
    Ok(block)
}

/// Continuum-limit diagonal entry at a hydrostatic state with stress S = s I:
/// -2 s |1+a|^(2m-2) Gamma(m). With the hydrostatic relation s = kappa a this
/// is the continuum instability indicator.
pub fn diag_block_continuum_hydro(
    m: SethHill,
    a: f64,
    kappa: f64,
    dim: usize,
    infl: &InfluenceSpec,
) -> f64 {
    let s = kappa * a;
    -2.0 * s * pow_ratio((1.0 + a).abs(), 2.0 * m.0 - 2.0) * gamma_m(m.0, dim, infl)
}

/// Perturbation work dT . dY of the generalized model for a given deformed
/// state and bond-perturbation field. Positive means the perturbation is
/// resisted (stable direction).
#[allow(clippy::too_many_arguments)]
pub fn silling_test(
    node: usize,
    dim: usize,
    bonds: &[crate::mesh::Bond],
    ys: &[[f64; 3]],
    dys: &[[f64; 3]],
    volumes: &[f64],
    stress: &Tensor2,
    moduli: &Tensor4,
    l_inv: &Tensor4,
    m: SethHill,
) -> Result<f64> {
    // dE_rs = Linv_turs * sum omega |Y|^(2m-2) (Y . dY) xi_t xi_u / |xi|^(2m+2)
    let mut bracket = Tensor2::zeros(dim);
    for ((b, y), dy) in bonds.iter().zip(ys).zip(dys) {
        let y2: f64 = y.iter().map(|v| v * v).sum();
        let xi2 = b.len * b.len;
        if y2 < (kinematics::COLLAPSE_RATIO * kinematics::COLLAPSE_RATIO) * xi2 {
            return Err(Error::CollapsedBond {
                node,
                neighbor: b.neighbor as usize,
                ratio: (y2 / xi2).sqrt(),
            });
        }
        let ydy: f64 = y.iter().zip(dy).map(|(a_, b_)| a_ * b_).sum();
        let s = b.weight * volumes[b.neighbor as usize] * pow_ratio(y2 / xi2, m.0 - 1.0) * ydy
            / (xi2 * xi2);
        for t in 0..dim {
            for u in 0..dim {
                bracket.set(t, u, bracket.get(t, u) + s * b.xi[t] * b.xi[u]);
            }
        }
    }
    let d_strain = l_inv.double_contract(&bracket)?;
    let d_stress = moduli.double_contract(&d_strain)?;
    let g_s = l_inv.double_contract(stress)?;
    let g_ds = l_inv.double_contract(&d_stress)?;

    let mut total = 0.0;
    for ((b, y), dy) in bonds.iter().zip(ys).zip(dys) {
        let y2: f64 = y.iter().map(|v| v * v).sum();
        let xi2 = b.len * b.len;
        let ydy: f64 = y.iter().zip(dy).map(|(a_, b_)| a_ * b_).sum();
        let dy2: f64 = dy.iter().map(|v| v * v).sum();
        let gxi_s = g_s.mul_vec(&b.xi);
        let gxi_ds = g_ds.mul_vec(&b.xi);
        let phi_s: f64 = (0..dim).map(|p| b.xi[p] * gxi_s[p]).sum();
        let phi_ds: f64 = (0..dim).map(|p| b.xi[p] * gxi_ds[p]).sum();
        let dv = volumes[b.neighbor as usize];
        let r2m2 = pow_ratio(y2 / xi2, m.0 - 1.0); // |Y|^(2m-2) / |xi|^(2m-2)
        // omega xi_p xi_q / |xi|^(2m+2) * [...] with the ratio powers folded in
        total += b.weight * dv / (xi2 * xi2)
            * (phi_ds * r2m2 * ydy
                + phi_s * (2.0 * (m.0 - 1.0) * r2m2 / y2 * ydy * ydy + r2m2 * dy2));
    }
    Ok(total)
}

/// dT . dY for perturbing a single node of a deformed body along `dx`:
/// every bond of the node sees dY = -dx.
pub fn silling_single_point_test(
    body: &Body,
    positions: &[[f64; 3]],
    node: usize,
    dx: &[f64; 3],
) -> Result<f64> {
    let m = match body.material.family {
        ModelFamily::Generalized(m) => m,
        ModelFamily::Silling => {
            return Err(Error::ContractViolation(
                "perturbation test applies to the generalized family".into(),
            ))
        }
    };
    let dim = body.dim();
    let bonds = body.families.family(node);
    let ys = deformed_bonds(node, bonds, positions);
    let dys = vec![[-dx[0], -dx[1], -dx[2]]; bonds.len()];
    let geo = &body.geometry[node];
    let x = &body.nodes.positions[node];
    let strain = kinematics::seth_hill_strain(
        node,
        dim,
        bonds,
        &ys,
        &body.nodes.volumes,
        &geo.l_inv,
        m,
    )?;
    let stress = material::stress_generalized(&strain, &body.material.law, x)?;
    let moduli = material::moduli(&body.material.law, dim, x);
    silling_test(
        node,
        dim,
        bonds,
        &ys,
        &dys,
        &body.nodes.volumes,
        &stress,
        &moduli,
        &geo.l_inv,
        m,
    )
}

/// Stability map over the (m, a) plane from the discrete hydrostatic
/// criteria. `unstable` is row-major over m (rows) then a (columns).
#[derive(Debug, Clone)]
pub struct RegionMap {
    pub dim: usize,
    pub n: usize,
    pub m_samples: Vec<f64>,
    pub a_samples: Vec<f64>,
    pub unstable: Vec<bool>,
}

impl RegionMap {
    pub fn unstable_at(&self, im: usize, ia: usize) -> bool {
        self.unstable[im * self.a_samples.len() + ia]
    }

    /// CSV: header row of a-samples, first column m-samples, cells 1 for
    /// unstable and 0 for stable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m");
        for a in &self.a_samples {
            out.push_str(&format!(",{a:.10e}"));
        }
        out.push('\n');
        for (im, m) in self.m_samples.iter().enumerate() {
            out.push_str(&format!("{m:.10e}"));
            for ia in 0..self.a_samples.len() {
                out.push_str(if self.unstable_at(im, ia) { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluates the discrete stability criterion over a rectangular (m, a) grid.
pub fn region_map(
    dim: usize,
    n: usize,
    m_range: (f64, f64),
    a_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<RegionMap> {
    if !(dim == 1 || dim == 2) {
        return Err(Error::Config("region maps cover dim 1 and 2".into()));
    }
    if a_range.0 <= -1.0 {
        return Err(Error::Config("a-range must lie inside (-1, inf)".into()));
    }
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(Error::Config("resolution must be at least 2 x 2".into()));
    }
    let lin = |lo: f64, hi: f64, k: usize| -> Vec<f64> {
        (0..k)
            .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
            .collect()
    };
    let m_samples = lin(m_range.0, m_range.1, resolution.0);
    let a_samples = lin(a_range.0, a_range.1, resolution.1);
    let na = a_samples.len();
    let unstable = exec::map_indexed(m_samples.len() * na, |idx| {
        let (im, ia) = (idx / na, idx % na);
        let m = SethHill(m_samples[im]);
        let a = a_samples[ia];
        match dim {
            1 => !stable_1d(m, a, n),
            _ => !stable_2d(m, a, n),
        }
    });
    Ok(RegionMap {
        dim,
        n,
        m_samples,
        a_samples,
        unstable,
    })
}

/// Summary of a hydrostatic stability evaluation.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub model: ModelFamily,
    pub dim: usize,
    pub n: usize,
    pub m: f64,
    pub a: f64,
    pub diag_block: Tensor2,
    pub eigenvalues: Vec<f64>,
    pub criterion_pass: bool,
    pub marginal: bool,
    pub critical_strain: Option<f64>,
}

/// Instability declaration tolerance: eigenvalues within +- this band count
/// as marginal rather than unstable (a zero eigenvalue is ambiguous).
pub fn marginal_tol(kappa: f64, dx: f64) -> f64 {
    1e-8 * kappa / (dx * dx)
}

/// Report for the 1D discrete hydrostatic state from the closed-form block.
pub fn hydro_report_1d(m: SethHill, a: f64, n: usize, kappa: f64, dx: f64) -> StabilityReport {
    let diag = df1d_closed_form(m, a, n, kappa, dx);
    let tol = marginal_tol(kappa, dx);
    let mut block = Tensor2::zeros(1);
    block.set(0, 0, diag);
    StabilityReport {
        model: ModelFamily::Generalized(m),
        dim: 1,
        n,
        m: m.0,
        a,
        diag_block: block,
        eigenvalues: vec![diag],
        criterion_pass: diag < tol,
        marginal: diag.abs() <= tol,
        critical_strain: critical_strain_1d(m, n),
    }
}

/// Report for the 2D discrete hydrostatic state from the closed-form
/// eigenvalues.
pub fn hydro_report_2d(m: SethHill, a: f64, n: usize, kappa: f64, dx: f64) -> StabilityReport {
    let (l1, l2) = eig_2d_hydro(m, a, n, kappa, dx);
    let tol = marginal_tol(kappa, dx);
    let max = l1.max(l2);
    let mut block = Tensor2::zeros(2);
    block.set(0, 0, l1);
    block.set(1, 1, l2);
    StabilityReport {
        model: ModelFamily::Generalized(m),
        dim: 2,
        n,
        m: m.0,
        a,
        diag_block: block,
        eigenvalues: vec![l1, l2],
        criterion_pass: max < tol,
        marginal: max.abs() <= tol,
        critical_strain: critical_strain_2d(m, n),
    }
}

/// Uniform 1D bar with the hydrostatic-linear law, for oracle comparisons
/// between the closed forms and the finite-difference Jacobian.
pub fn hydrostatic_body_1d(
    n_nodes: usize,
    dx: f64,
    n_horizon: usize,
    kappa: f64,
    m: SethHill,
) -> Result<Body> {
    let nodes = crate::mesh::build_grid(&crate::mesh::GridSpec {
        dim: 1,
        extents: [n_nodes as f64 * dx, 0.0, 0.0],
        dx,
        cross_section: 1.0,
    })?;
    let families =
        crate::mesh::build_families(&nodes, &InfluenceSpec::step(n_horizon as f64 * dx))?;
    Body::new(
        nodes,
        families,
        crate::material::MaterialSpec {
            family: ModelFamily::Generalized(m),
            law: crate::material::LocalLaw::HydrostaticLinear { kappa },
            rho0: 1.0,
        },
    )
}

/// Positions of the uniform hydrostatic state x = (1 + a) X.
pub fn hydrostatic_positions(nodes: &crate::mesh::NodeSet, a: f64) -> Vec<[f64; 3]> {
    nodes
        .positions
        .iter()
        .map(|x| {
            let mut out = *x;
            for v in out.iter_mut().take(nodes.dim) {
                *v *= 1.0 + a;
            }
            out
        })
        .collect()
}

/// Eigenvalues of the symmetric part of a diagonal block.
pub fn block_eigenvalues(block: &Tensor2) -> Vec<f64> {
    let dim = block.dim();
    let mut flat = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            flat[i * dim + j] = block.get(i, j);
        }
    }
    linalg::sym_eigvals(dim, &flat)
}
