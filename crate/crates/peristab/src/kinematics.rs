//! Nonlocal kinematics: shape tensors K and L, the nonlocal deformation
//! gradient, nonlocal Cauchy-Green tensors, and the Seth-Hill strain family
//! including the logarithmic member.

use crate::error::{Error, Result};
use crate::linalg;
use crate::mesh::{Bond, FamilyMap, NodeSet};
use crate::tensor::{Tensor2, Tensor4, COND_CAP};

/// Deformed bond length below `COLLAPSE_RATIO * |xi|` raises `CollapsedBond`
/// instead of returning infinities from negative powers.
pub const COLLAPSE_RATIO: f64 = 1e-10;

/// Seth-Hill exponent. `|m| < 1e-9` selects the logarithmic branch, which is
/// the m -> 0 limit of (C^m - I)/(2m); the threshold prevents catastrophic
/// cancellation near zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SethHill(pub f64);

impl SethHill {
    pub const LOG_THRESHOLD: f64 = 1e-9;

    pub fn is_log(&self) -> bool {
        self.0.abs() < Self::LOG_THRESHOLD
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// t^m for t > 0 with fast paths for the common exponents.
#[inline]
pub fn pow_ratio(t: f64, m: f64) -> f64 {
    if m == 1.0 {
        t
    } else if m == 2.0 {
        t * t
    } else if m == 0.5 {
        t.sqrt()
    } else if m == -1.0 {
        1.0 / t
    } else if m == 0.0 {
        1.0
    } else {
        t.powf(m)
    }
}

/// Second-order shape tensor K = sum(omega * xi (x) xi * dV).
pub fn shape_tensor_k(dim: usize, bonds: &[Bond], volumes: &[f64]) -> Result<Tensor2> {
    if bonds.is_empty() {
        return Err(Error::ContractViolation("empty family".into()));
    }
    let mut k = Tensor2::zeros(dim);
    for b in bonds {
        let s = b.weight * volumes[b.neighbor as usize];
        for i in 0..dim {
            for j in 0..dim {
                k.set(i, j, k.get(i, j) + s * b.xi[i] * b.xi[j]);
            }
        }
    }
    Ok(k)
}

/// Fourth-order shape tensor L = sum(omega * xi(x)xi(x)xi(x)xi / |xi|^4 * dV);
/// fully symmetric by construction.
pub fn shape_tensor_l(dim: usize, bonds: &[Bond], volumes: &[f64]) -> Result<Tensor4> {
    if bonds.is_empty() {
        return Err(Error::ContractViolation("empty family".into()));
    }
    let mut l = Tensor4::zeros(dim);
    for b in bonds {
        let s = b.weight * volumes[b.neighbor as usize] / b.len.powi(4);
        l.add_scaled_outer4(&b.xi, s);
    }
    Ok(l)
}

/// Reference-configuration shape data cached per node.
#[derive(Debug, Clone)]
pub struct NodalGeometry {
    pub k: Tensor2,
    pub k_inv: Tensor2,
    pub l: Tensor4,
    pub l_inv: Tensor4,
}

/// Computes and inverts both shape tensors for every node. They never change
/// during deformation, so this runs once at setup.
pub fn precompute_geometry(nodes: &NodeSet, families: &FamilyMap) -> Result<Vec<NodalGeometry>> {
    (0..nodes.len())
        .map(|i| {
            let bonds = families.family(i);
            let k = shape_tensor_k(nodes.dim, bonds, &nodes.volumes)?;
            let cond = k.cond();
            if !cond.is_finite() || cond > COND_CAP {
                return Err(Error::SingularShapeTensor {
                    cond,
                    cap: COND_CAP,
                });
            }
            let k_inv = k.inverse()?;
            let l = shape_tensor_l(nodes.dim, bonds, &nodes.volumes)?;
            let l_inv = l.invert_sym4(COND_CAP)?;
            Ok(NodalGeometry { k, k_inv, l, l_inv })
        })
        .collect()
}

/// Deformed bond images `Y<xi> = x(X + xi) - x(X)` for one node's family.
pub fn deformed_bonds(node: usize, bonds: &[Bond], positions: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let x0 = positions[node];
    bonds
        .iter()
        .map(|b| {
            let xj = positions[b.neighbor as usize];
            [xj[0] - x0[0], xj[1] - x0[1], xj[2] - x0[2]]
        })
        .collect()
}

#[inline]
fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn check_bond(node: usize, b: &Bond, y_len: f64) -> Result<()> {
    if y_len < COLLAPSE_RATIO * b.len {
        return Err(Error::CollapsedBond {
            node,
            neighbor: b.neighbor as usize,
            ratio: y_len / b.len,
        });
    }
    Ok(())
}

/// Nonlocal deformation gradient F = [sum(omega * Y (x) xi * dV)] K^-1.
pub fn def_grad_bar(
    dim: usize,
    bonds: &[Bond],
    ys: &[[f64; 3]],
    volumes: &[f64],
    k_inv: &Tensor2,
) -> Tensor2 {
    let mut a = Tensor2::zeros(dim);
    for (b, y) in bonds.iter().zip(ys) {
        let s = b.weight * volumes[b.neighbor as usize];
        for i in 0..dim {
            for j in 0..dim {
                a.set(i, j, a.get(i, j) + s * y[i] * b.xi[j]);
            }
        }
    }
    a.matmul(k_inv)
}

/// Nonlocal right Cauchy-Green tensor for exponent m != 0:
/// C_(m) = [sum(omega * (|Y|/|xi|)^(2m) * xi(x)xi/|xi|^2 * dV)] : L^-1.
pub fn cauchy_green_bar(
    node: usize,
    dim: usize,
    bonds: &[Bond],
    ys: &[[f64; 3]],
    volumes: &[f64],
    l_inv: &Tensor4,
    m: SethHill,
) -> Result<Tensor2> {
    if m.is_log() {
        return Err(Error::ContractViolation(
            "cauchy_green_bar requires m != 0; use seth_hill_strain for the logarithmic branch"
                .into(),
        ));
    }
    let mut acc = Tensor2::zeros(dim);
    for (b, y) in bonds.iter().zip(ys) {
        let y_len = norm(y);
        check_bond(node, b, y_len)?;
        let ratio2 = (y_len / b.len).powi(2);
        let s = b.weight * volumes[b.neighbor as usize] * pow_ratio(ratio2, m.0) / (b.len * b.len);
        for i in 0..dim {
            for j in 0..dim {
                acc.set(i, j, acc.get(i, j) + s * b.xi[i] * b.xi[j]);
            }
        }
    }
    l_inv.double_contract(&acc)
}

/// Peridynamic Lagrangian Seth-Hill strain: (C_(m) - I)/(2m) for m != 0 and
/// the logarithmic form [sum(omega * ln(|Y|/|xi|) xi(x)xi/|xi|^2 dV)] : L^-1
/// for m = 0.
pub fn seth_hill_strain(
    node: usize,
    dim: usize,
    bonds: &[Bond],
    ys: &[[f64; 3]],
    volumes: &[f64],
    l_inv: &Tensor4,
    m: SethHill,
) -> Result<Tensor2> {
    if m.is_log() {
        let mut acc = Tensor2::zeros(dim);
        for (b, y) in bonds.iter().zip(ys) {
            let y_len = norm(y);
            check_bond(node, b, y_len)?;
            let s = b.weight * volumes[b.neighbor as usize] * (y_len / b.len).ln()
                / (b.len * b.len);
            for i in 0..dim {
                for j in 0..dim {
                    acc.set(i, j, acc.get(i, j) + s * b.xi[i] * b.xi[j]);
                }
            }
        }
        l_inv.double_contract(&acc)
    } else {
        let c = cauchy_green_bar(node, dim, bonds, ys, volumes, l_inv, m)?;
        Ok(c.sub(&Tensor2::identity(dim)).scale(1.0 / (2.0 * m.0)))
    }
}

/// Local (classical) Seth-Hill strain of a deformation gradient, via the
/// eigen decomposition of C = F^T F. Oracle counterpart of the nonlocal
/// measures under homogeneous deformation.
pub fn local_seth_hill(f: &Tensor2, m: SethHill) -> Tensor2 {
    let dim = f.dim();
    let c = f.transpose().matmul(f);
    let mut flat = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            flat[i * dim + j] = c.get(i, j);
        }
    }
    let (eig, vecs) = linalg::sym_eig(dim, &flat);
    Tensor2::from_fn(dim, |i, j| {
        (0..dim)
            .map(|k| {
                let lam = eig[k];
                let g = if m.is_log() {
                    0.5 * lam.ln()
                } else {
                    (pow_ratio(lam, m.0) - 1.0) / (2.0 * m.0)
                };
                vecs[i * dim + k] * g * vecs[j * dim + k]
            })
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_families, build_grid, GridSpec, InfluenceSpec};
    use crate::rng::SplitMix64;

    fn grid(dim: usize, n_per_axis: usize, dx: f64) -> (NodeSet, FamilyMap) {
        let mut extents = [0.0; 3];
        for e in extents.iter_mut().take(dim) {
            *e = n_per_axis as f64 * dx;
        }
        let nodes = build_grid(&GridSpec {
            dim,
            extents,
            dx,
            cross_section: 1.0,
        })
        .unwrap();
        let fams = build_families(&nodes, &InfluenceSpec::step(3.0 * dx)).unwrap();
        (nodes, fams)
    }

    fn center(nodes: &NodeSet) -> usize {
        let c = [
            nodes.counts[0] / 2,
            (nodes.counts[1] / 2).min(nodes.counts[1].saturating_sub(1)),
            (nodes.counts[2] / 2).min(nodes.counts[2].saturating_sub(1)),
        ];
        nodes.node_id(c)
    }

    fn homogeneous_positions(nodes: &NodeSet, f: &Tensor2) -> Vec<[f64; 3]> {
        nodes
            .positions
            .iter()
            .map(|x| {
                let mut out = *x;
                let fx = f.mul_vec(x);
                out[..nodes.dim].copy_from_slice(&fx[..nodes.dim]);
                out
            })
            .collect()
    }

    fn random_f(dim: usize, rng: &mut SplitMix64) -> Tensor2 {
        loop {
            let f = Tensor2::from_fn(dim, |i, j| {
                let base = if i == j { 1.0 } else { 0.0 };
                base + 0.3 * rng.next_signed()
            });
            if f.det() > 0.2 {
                return f;
            }
        }
    }

    #[test]
    fn shape_k_1d_n3_matches_hand_sum() {
        let dx = 0.5;
        let (nodes, fams) = grid(1, 20, dx);
        let k = shape_tensor_k(1, fams.family(10), &nodes.volumes).unwrap();
        // 2 (1 + 4 + 9) dx^2 * A dx = 28 A dx^3
        assert!((k.get(0, 0) - 28.0 * dx.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn shape_k_single_bond() {
        let dx = 0.25;
        let bonds = [Bond {
            neighbor: 0,
            xi: [dx, 0.0, 0.0],
            len: dx,
            weight: 1.0,
        }];
        let vols = [dx];
        let k = shape_tensor_k(1, &bonds, &vols).unwrap();
        assert!((k.get(0, 0) - dx * dx * dx).abs() < 1e-15);
    }

    #[test]
    fn shape_k_3d_approaches_continuum_step_value() {
        // K -> (4 pi / 15) delta^5 I as dx -> 0
        let delta: f64 = 1.0;
        let exact = 4.0 * std::f64::consts::PI / 15.0 * delta.powi(5);
        let mut errs = Vec::new();
        for n in [3usize, 6] {
            let dx = delta / n as f64;
            let nodes = build_grid(&GridSpec {
                dim: 3,
                extents: [3.0, 3.0, 3.0],
                dx,
                cross_section: 1.0,
            })
            .unwrap();
            let fams = build_families(&nodes, &InfluenceSpec::step(delta)).unwrap();
            let c = center(&nodes);
            let k = shape_tensor_k(3, fams.family(c), &nodes.volumes).unwrap();
            errs.push(((k.get(0, 0) - exact) / exact).abs());
            assert!(k.get(0, 1).abs() < 1e-12 * k.get(0, 0));
        }
        assert!(errs[1] < errs[0], "3D K errors: {errs:?}");
        assert!(errs[1] < 0.05);
    }

    #[test]
    fn shape_l_1d_equals_weighted_volume() {
        let dx = 0.5;
        let (nodes, fams) = grid(1, 20, dx);
        let l = shape_tensor_l(1, fams.family(10), &nodes.volumes).unwrap();
        // L = sum(omega dV) = 2 A N dx = 6 A dx
        assert!((l.get(0, 0, 0, 0) - 6.0 * dx).abs() < 1e-12);
    }

    #[test]
    fn shape_l_trace_contraction_equals_weighted_volume() {
        for dim in 1..=3 {
            let (nodes, fams) = grid(dim, if dim == 3 { 8 } else { 12 }, 1.0);
            let c = center(&nodes);
            let bonds = fams.family(c);
            let l = shape_tensor_l(dim, bonds, &nodes.volumes).unwrap();
            let li = l.double_contract(&Tensor2::identity(dim)).unwrap();
            let v_omega: f64 = bonds
                .iter()
                .map(|b| b.weight * nodes.volumes[b.neighbor as usize])
                .sum();
            assert!((li.trace() - v_omega).abs() < 1e-12 * v_omega);
        }
    }

    #[test]
    fn shape_l_2d_approaches_continuum_isotropic_form() {
        let delta = 1.0;
        let mut errs = Vec::new();
        for n in [3usize, 12] {
            let dx = delta / n as f64;
            let nodes = build_grid(&GridSpec {
                dim: 2,
                extents: [3.0, 3.0, 0.0],
                dx,
                cross_section: 1.0,
            })
            .unwrap();
            let fams = build_families(&nodes, &InfluenceSpec::step(delta)).unwrap();
            let c = center(&nodes);
            let bonds = fams.family(c);
            let l = shape_tensor_l(2, bonds, &nodes.volumes).unwrap();
            let v_omega: f64 = bonds
                .iter()
                .map(|b| b.weight * nodes.volumes[b.neighbor as usize])
                .sum();
            let closed = Tensor4::isotropic(2, v_omega / 8.0, v_omega / 8.0);
            errs.push(l.max_abs_diff(&closed) / closed.norm_inf());
        }
        assert!(errs[1] < errs[0], "2D L errors: {errs:?}");
        assert!(errs[1] < 0.02);
    }

    #[test]
    fn shape_l_is_fully_symmetric() {
        let (nodes, fams) = grid(3, 8, 1.0);
        let c = center(&nodes);
        let l = shape_tensor_l(3, fams.family(c), &nodes.volumes).unwrap();
        assert!(l.is_fully_symmetric(1e-13));
    }

    #[test]
    fn def_grad_identity_and_homogeneous_exactness() {
        let mut rng = SplitMix64::new(31);
        for dim in 1..=3 {
            let (nodes, fams) = grid(dim, if dim == 3 { 8 } else { 14 }, 1.0);
            let geo = precompute_geometry(&nodes, &fams).unwrap();
            let c = center(&nodes);
            let bonds = fams.family(c);

            let ys_ref = deformed_bonds(c, bonds, &nodes.positions);
            let f_id = def_grad_bar(dim, bonds, &ys_ref, &nodes.volumes, &geo[c].k_inv);
            assert!(f_id.max_abs_diff(&Tensor2::identity(dim)) < 1e-13);

            for _ in 0..5 {
                let f = random_f(dim, &mut rng);
                let pos = homogeneous_positions(&nodes, &f);
                let ys = deformed_bonds(c, bonds, &pos);
                let fbar = def_grad_bar(dim, bonds, &ys, &nodes.volumes, &geo[c].k_inv);
                assert!(
                    fbar.max_abs_diff(&f) < 1e-12 * f.norm_inf(),
                    "dim {dim}: {:?} vs {:?}",
                    fbar,
                    f
                );
            }
        }
    }

    #[test]
    fn def_grad_1d_hydrostatic() {
        let (nodes, fams) = grid(1, 20, 1.0);
        let geo = precompute_geometry(&nodes, &fams).unwrap();
        let a = 0.37;
        let f = Tensor2::from_fn(1, |_, _| 1.0 + a);
        let pos = homogeneous_positions(&nodes, &f);
        let ys = deformed_bonds(10, fams.family(10), &pos);
        let fbar = def_grad_bar(1, fams.family(10), &ys, &nodes.volumes, &geo[10].k_inv);
        assert!((fbar.get(0, 0) - (1.0 + a)).abs() < 1e-13);
    }

    #[test]
    fn cauchy_green_undeformed_is_identity() {
        for dim in 1..=3 {
            let (nodes, fams) = grid(dim, if dim == 3 { 8 } else { 12 }, 1.0);
            let geo = precompute_geometry(&nodes, &fams).unwrap();
            let c = center(&nodes);
            let bonds = fams.family(c);
            let ys = deformed_bonds(c, bonds, &nodes.positions);
            for m in [-1.0, 0.5, 1.0, 2.0] {
                let cbar = cauchy_green_bar(
                    c,
                    dim,
                    bonds,
                    &ys,
                    &nodes.volumes,
                    &geo[c].l_inv,
                    SethHill(m),
                )
                .unwrap();
                assert!(cbar.max_abs_diff(&Tensor2::identity(dim)) < 1e-12);
            }
        }
    }

    #[test]
    fn cauchy_green_hydrostatic_closed_form() {
        for dim in [2usize, 3] {
            let (nodes, fams) = grid(dim, if dim == 3 { 8 } else { 12 }, 1.0);
            let geo = precompute_geometry(&nodes, &fams).unwrap();
            let c = center(&nodes);
            let bonds = fams.family(c);
            let a = -0.2;
            let f = Tensor2::identity(dim).scale(1.0 + a);
            let pos = homogeneous_positions(&nodes, &f);
            let ys = deformed_bonds(c, bonds, &pos);
            for m in [-1.0, 0.5, 1.0, 2.0] {
                let cbar = cauchy_green_bar(
                    c,
                    dim,
                    bonds,
                    &ys,
                    &nodes.volumes,
                    &geo[c].l_inv,
                    SethHill(m),
                )
                .unwrap();
                let expect = Tensor2::identity(dim).scale((1.0f64 + a).powf(2.0 * m));
                assert!(cbar.max_abs_diff(&expect) < 1e-12 * expect.norm_inf());
            }
        }
    }

    #[test]
    fn cauchy_green_matches_direct_sum_oracle() {
        // independent brute-force evaluation: naive loops, no cached L^-1 use
        let (nodes, fams) = grid(2, 12, 1.0);
        let geo = precompute_geometry(&nodes, &fams).unwrap();
        let c = center(&nodes);
        let bonds = fams.family(c);
        let f = Tensor2::from_fn(2, |i, j| [[1.15, 0.1], [0.05, 0.92]][i][j]);
        let pos = homogeneous_positions(&nodes, &f);
        let ys = deformed_bonds(c, bonds, &pos);
        let m = 1.7;

        let mut bracket = Tensor2::zeros(2);
        for (b, y) in bonds.iter().zip(&ys) {
            let ratio = (y[0] * y[0] + y[1] * y[1]).sqrt() / b.len;
            let s = b.weight * nodes.volumes[b.neighbor as usize] * ratio.powf(2.0 * m)
                / (b.len * b.len);
            for i in 0..2 {
                for j in 0..2 {
                    bracket.set(i, j, bracket.get(i, j) + s * b.xi[i] * b.xi[j]);
                }
            }
        }
        let mut oracle = Tensor2::zeros(2);
        for r in 0..2 {
            for s_ in 0..2 {
                let mut acc = 0.0;
                for t in 0..2 {
                    for u in 0..2 {
                        acc += geo[c].l_inv.get(t, u, r, s_) * bracket.get(t, u);
                    }
                }
                oracle.set(r, s_, acc);
            }
        }
        let cbar = cauchy_green_bar(c, 2, bonds, &ys, &nodes.volumes, &geo[c].l_inv, SethHill(m))
            .unwrap();
        assert!(cbar.max_abs_diff(&oracle) < 1e-13 * oracle.norm_inf());
    }

    #[test]
    fn collapsed_bond_is_detected() {
        let (nodes, fams) = grid(1, 12, 1.0);
        let geo = precompute_geometry(&nodes, &fams).unwrap();
        let mut pos = nodes.positions.clone();
        pos[7] = pos[6]; // collapse one bond
        let ys = deformed_bonds(6, fams.family(6), &pos);
        let r = cauchy_green_bar(
            6,
            1,
            fams.family(6),
            &ys,
            &nodes.volumes,
            &geo[6].l_inv,
            SethHill(-1.0),
        );
        match r {
            Err(Error::CollapsedBond { node: 6, .. }) => {}
            other => panic!("expected CollapsedBond, got {other:?}"),
        }
    }

    #[test]
    fn strain_zero_for_undeformed() {
        let (nodes, fams) = grid(2, 12, 1.0);
        let geo = precompute_geometry(&nodes, &fams).unwrap();
        let c = center(&nodes);
        let bonds = fams.family(c);
        let ys = deformed_bonds(c, bonds, &nodes.positions);
        for m in [-1.0, 0.0, 0.5, 1.0, 2.0] {
            let e = seth_hill_strain(
                c,
                2,
                bonds,
                &ys,
                &nodes.volumes,
                &geo[c].l_inv,
                SethHill(m),
            )
            .unwrap();
            assert!(e.norm_inf() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn strain_1d_hydrostatic_closed_forms() {
        let (nodes, fams) = grid(1, 20, 1.0);
        let geo = precompute_geometry(&nodes, &fams).unwrap();
        let a = 0.4;
        let f = Tensor2::from_fn(1, |_, _| 1.0 + a);
        let pos = homogeneous_positions(&nodes, &f);
        let ys = deformed_bonds(10, fams.family(10), &pos);
        for m in [-1.0, 0.5, 1.0, 2.0] {
            let e = seth_hill_strain(
                10,
                1,
                fams.family(10),
                &ys,
                &nodes.volumes,
                &geo[10].l_inv,
                SethHill(m),
            )
            .unwrap();
            let expect = ((1.0f64 + a).powf(2.0 * m) - 1.0) / (2.0 * m);
            assert!((e.get(0, 0) - expect).abs() < 1e-12 * expect.abs().max(1.0));
        }
        let e0 = seth_hill_strain(
            10,
            1,
            fams.family(10),
            &ys,
            &nodes.volumes,
            &geo[10].l_inv,
            SethHill(0.0),
        )
        .unwrap();
        assert!((e0.get(0, 0) - (1.0f64 + a).ln()).abs() < 1e-13);
    }

    #[test]
    fn strain_continuous_in_m_near_zero() {
        let mut rng = SplitMix64::new(77);
        for dim in 1..=3 {
            let (nodes, fams) = grid(dim, if dim == 3 { 8 } else { 12 }, 1.0);
            let geo = precompute_geometry(&nodes, &fams).unwrap();
            let c = center(&nodes);
            let bonds = fams.family(c);
            let f = random_f(dim, &mut rng);
            let pos = homogeneous_positions(&nodes, &f);
            let ys = deformed_bonds(c, bonds, &pos);
            let e_small = seth_hill_strain(
                c,
                dim,
                bonds,
                &ys,
                &nodes.volumes,
                &geo[c].l_inv,
                SethHill(1e-6),
            )
            .unwrap();
            let e_log = seth_hill_strain(
                c,
                dim,
                bonds,
                &ys,
                &nodes.volumes,
                &geo[c].l_inv,
                SethHill(0.0),
            )
            .unwrap();
            assert!(e_small.max_abs_diff(&e_log) < 1e-5);
        }
    }

    #[test]
    fn cauchy_green_is_objective_under_rotation() {
        let (nodes, fams) = grid(3, 8, 1.0);
        let geo = precompute_geometry(&nodes, &fams).unwrap();
        let c = center(&nodes);
        let bonds = fams.family(c);
        let mut rng = SplitMix64::new(5);
        let f = random_f(3, &mut rng);
        let pos = homogeneous_positions(&nodes, &f);
        let ys = deformed_bonds(c, bonds, &pos);
        // rotation about (1,1,1)/sqrt(3) by 0.7 rad (Rodrigues)
        let axis = [1.0 / 3f64.sqrt(); 3];
        let th: f64 = 0.7;
        let (s, co) = th.sin_cos();
        let q = Tensor2::from_fn(3, |i, j| {
            let eye = if i == j { 1.0 } else { 0.0 };
            let skew = match (i, j) {
                (0, 1) => -axis[2],
                (0, 2) => axis[1],
                (1, 0) => axis[2],
                (1, 2) => -axis[0],
                (2, 0) => -axis[1],
                (2, 1) => axis[0],
                _ => 0.0,
            };
            eye * co + s * skew + (1.0 - co) * axis[i] * axis[j]
        });
        let ys_rot: Vec<[f64; 3]> = ys.iter().map(|y| q.mul_vec(y)).collect();
        for m in [0.5, 1.0, 2.0] {
            let c1 = cauchy_green_bar(c, 3, bonds, &ys, &nodes.volumes, &geo[c].l_inv, SethHill(m))
                .unwrap();
            let c2 = cauchy_green_bar(
                c,
                3,
                bonds,
                &ys_rot,
                &nodes.volumes,
                &geo[c].l_inv,
                SethHill(m),
            )
            .unwrap();
            assert!(c1.max_abs_diff(&c2) < 1e-12 * c1.norm_inf());
        }
    }

    #[test]
    fn local_seth_hill_known_values() {
        // uniaxial stretch 1.5 along x in 2D
        let f = Tensor2::from_fn(2, |i, j| if i == 0 && j == 0 { 1.5 } else if i == j { 1.0 } else { 0.0 });
        let e1 = local_seth_hill(&f, SethHill(1.0));
        assert!((e1.get(0, 0) - (1.5f64.powi(2) - 1.0) / 2.0).abs() < 1e-14);
        assert!(e1.get(1, 1).abs() < 1e-14);
        let e0 = local_seth_hill(&f, SethHill(0.0));
        assert!((e0.get(0, 0) - 1.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn nonlocal_strain_exact_for_m1_general_f_and_all_m_conformal() {
        let mut rng = SplitMix64::new(99);
        for dim in 1..=3 {
            let (nodes, fams) = grid(dim, if dim == 3 { 8 } else { 12 }, 1.0);
            let geo = precompute_geometry(&nodes, &fams).unwrap();
            let c = center(&nodes);
            let bonds = fams.family(c);

            // m = 1: exact for any F
            for _ in 0..3 {
                let f = random_f(dim, &mut rng);
                let pos = homogeneous_positions(&nodes, &f);
                let ys = deformed_bonds(c, bonds, &pos);
                let e = seth_hill_strain(
                    c,
                    dim,
                    bonds,
                    &ys,
                    &nodes.volumes,
                    &geo[c].l_inv,
                    SethHill(1.0),
                )
                .unwrap();
                let local = local_seth_hill(&f, SethHill(1.0));
                assert!(e.max_abs_diff(&local) < 1e-12 * local.norm_inf().max(1.0));
            }

            // all m: exact for hydrostatic stretches
            let a = 0.23;
            let f = Tensor2::identity(dim).scale(1.0 + a);
            let pos = homogeneous_positions(&nodes, &f);
            let ys = deformed_bonds(c, bonds, &pos);
            for m in [-1.0, 0.0, 0.5, 1.0, 2.0] {
                let e = seth_hill_strain(
                    c,
                    dim,
                    bonds,
                    &ys,
                    &nodes.volumes,
                    &geo[c].l_inv,
                    SethHill(m),
                )
                .unwrap();
                let local = local_seth_hill(&f, SethHill(m));
                assert!(
                    e.max_abs_diff(&local) < 1e-12 * local.norm_inf().max(1.0),
                    "dim {dim}, m {m}"
                );
            }
        }
    }
}
