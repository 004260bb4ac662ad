//! Constitutive laws and peridynamic force vector states for both
//! correspondence families, plus assembly of nodal internal forces.
//!
//! Assembly runs in two phases with a barrier between them: all nodal
//! stresses first (they need only the node's own family), then all forces
//! (each node combines its own stress kernel with its neighbors').

use crate::error::{Error, Result};
use crate::exec;
use crate::kinematics::{
    self, deformed_bonds, pow_ratio, NodalGeometry, SethHill,
};
use crate::mesh::{Bond, FamilyMap, NodeSet};
use crate::tensor::{Tensor2, Tensor4};
use std::sync::Arc;

/// Spatially varying or constant scalar field, sampled at node locations.
#[derive(Clone)]
pub enum ScalarField {
    Const(f64),
    Fn(Arc<dyn Fn(&[f64; 3]) -> f64 + Send + Sync>),
}

impl ScalarField {
    pub fn at(&self, x: &[f64; 3]) -> f64 {
        match self {
            ScalarField::Const(v) => *v,
            ScalarField::Fn(f) => f(x),
        }
    }
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarField::Const(v) => write!(f, "Const({v})"),
            ScalarField::Fn(_) => write!(f, "Fn(..)"),
        }
    }
}

/// Local constitutive law driving the correspondence force state.
#[derive(Debug, Clone)]
pub enum LocalLaw {
    /// S = kappa * E; the linear law of the hydrostatic stability analysis.
    HydrostaticLinear { kappa: f64 },
    /// 1D bar law S = E(x) * E, with an optionally varying Young's modulus.
    Hookean1d { modulus: ScalarField },
    /// S = lambda tr(E) I + 2 mu E.
    IsotropicLinear { lambda: f64, mu: f64 },
}

impl LocalLaw {
    /// Largest elastic modulus, for force scales and CFL-style caps.
    pub fn modulus_scale(&self) -> f64 {
        match self {
            LocalLaw::HydrostaticLinear { kappa } => *kappa,
            LocalLaw::Hookean1d { modulus } => match modulus {
                ScalarField::Const(v) => *v,
                ScalarField::Fn(_) => 1.0,
            },
            LocalLaw::IsotropicLinear { lambda, mu } => lambda + 2.0 * mu,
        }
    }
}

/// Model family: the original correspondence model or the generalized
/// finite-deformation family with Seth-Hill exponent m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelFamily {
    Silling,
    Generalized(SethHill),
}

#[derive(Debug, Clone)]
pub struct MaterialSpec {
    pub family: ModelFamily,
    pub law: LocalLaw,
    pub rho0: f64,
}

/// Generalized Kirchhoff stress from the nonlocal Seth-Hill strain.
pub fn stress_generalized(strain: &Tensor2, law: &LocalLaw, x: &[f64; 3]) -> Result<Tensor2> {
    if !strain.is_symmetric(1e-10) {
        return Err(Error::ContractViolation("strain must be symmetric".into()));
    }
    let dim = strain.dim();
    match law {
        LocalLaw::HydrostaticLinear { kappa } => Ok(strain.scale(*kappa)),
        LocalLaw::Hookean1d { modulus } => {
            if dim != 1 {
                return Err(Error::DimensionMismatch(
                    "hookean-1d law requires dim = 1".into(),
                ));
            }
            Ok(strain.scale(modulus.at(x)))
        }
        LocalLaw::IsotropicLinear { lambda, mu } => {
            let mut s = strain.scale(2.0 * mu);
            s.add_assign_scaled(&Tensor2::identity(dim), lambda * strain.trace());
            Ok(s)
        }
    }
}

/// Constitutive tangent dS/dE as a fourth-order tensor (exact derivative of
/// `stress_generalized` on the symmetric subspace).
pub fn moduli(law: &LocalLaw, dim: usize, x: &[f64; 3]) -> Tensor4 {
    match law {
        LocalLaw::HydrostaticLinear { kappa } => Tensor4::identity_sym(dim).scale(*kappa),
        LocalLaw::Hookean1d { modulus } => {
            let e = modulus.at(x);
            Tensor4::from_fn(dim, |_, _, _, _| e)
        }
        LocalLaw::IsotropicLinear { lambda, mu } => Tensor4::isotropic(dim, *lambda, *mu),
    }
}

/// The spherical tangent kappa * d_ij d_rs adopted by the hydrostatic
/// stability reduction (it matches `moduli` of the hydrostatic law in 1D
/// but not above).
pub fn hydrostatic_reduction_moduli(kappa: f64, dim: usize) -> Tensor4 {
    Tensor4::from_fn(dim, |i, j, r, s| if i == j && r == s { kappa } else { 0.0 })
}

/// First Piola-Kirchhoff stress for the original model: linear laws in F - I.
pub fn first_pk_silling(f_bar: &Tensor2, law: &LocalLaw, x: &[f64; 3]) -> Result<Tensor2> {
    let dim = f_bar.dim();
    let h = f_bar.sub(&Tensor2::identity(dim));
    match law {
        LocalLaw::HydrostaticLinear { kappa } => Ok(h.scale(*kappa)),
        LocalLaw::Hookean1d { modulus } => {
            if dim != 1 {
                return Err(Error::DimensionMismatch(
                    "hookean-1d law requires dim = 1".into(),
                ));
            }
            Ok(h.scale(modulus.at(x)))
        }
        LocalLaw::IsotropicLinear { lambda, mu } => {
            let sym = h.sym();
            let mut s = sym.scale(2.0 * mu);
            s.add_assign_scaled(&Tensor2::identity(dim), lambda * h.trace());
            Ok(s)
        }
    }
}

/// Strain energy density of the generalized laws (the potential whose
/// gradient is the assembled internal force field).
pub fn energy_density(strain: &Tensor2, law: &LocalLaw, x: &[f64; 3]) -> f64 {
    let dim = strain.dim();
    let frob: f64 = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .map(|(i, j)| strain.get(i, j) * strain.get(i, j))
        .sum();
    match law {
        LocalLaw::HydrostaticLinear { kappa } => 0.5 * kappa * frob,
        LocalLaw::Hookean1d { modulus } => 0.5 * modulus.at(x) * frob,
        LocalLaw::IsotropicLinear { lambda, mu } => {
            let tr = strain.trace();
            0.5 * lambda * tr * tr + mu * frob
        }
    }
}

/// Force vector state of the generalized model:
/// T_k = omega * S_ij (xi_p xi_q / |xi|^2) Linv_pqij (|Y|/|xi|)^(2m) Y_k/|Y|^2.
pub fn force_state_generalized(
    bond: &Bond,
    y: &[f64; 3],
    stress: &Tensor2,
    l_inv: &Tensor4,
    m: SethHill,
) -> Result<[f64; 3]> {
    let kernel = l_inv.double_contract(stress)?;
    force_state_generalized_kernel(bond, y, &kernel, m, 0)
}

/// Same force state with the kernel G = Linv : S precomputed per node.
#[inline]
pub fn force_state_generalized_kernel(
    bond: &Bond,
    y: &[f64; 3],
    kernel: &Tensor2,
    m: SethHill,
    node: usize,
) -> Result<[f64; 3]> {
    let y2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    let xi2 = bond.len * bond.len;
    if y2 < (kinematics::COLLAPSE_RATIO * kinematics::COLLAPSE_RATIO) * xi2 {
        return Err(Error::CollapsedBond {
            node,
            neighbor: bond.neighbor as usize,
            ratio: (y2 / xi2).sqrt(),
        });
    }
    let gxi = kernel.mul_vec(&bond.xi);
    let phi = (bond.xi[0] * gxi[0] + bond.xi[1] * gxi[1] + bond.xi[2] * gxi[2]) / xi2;
    let scale = bond.weight * phi * pow_ratio(y2 / xi2, m.0) / y2;
    Ok([scale * y[0], scale * y[1], scale * y[2]])
}

/// Force vector state of the original model: T = omega * sigma Kinv xi.
pub fn force_state_silling(bond: &Bond, sigma: &Tensor2, k_inv: &Tensor2) -> [f64; 3] {
    let m = sigma.matmul(k_inv);
    let v = m.mul_vec(&bond.xi);
    [
        bond.weight * v[0],
        bond.weight * v[1],
        bond.weight * v[2],
    ]
}

/// Per-node constitutive snapshot for one deformation state.
#[derive(Debug, Clone)]
pub struct NodalState {
    /// Nonlocal strain (generalized family) or F - I (original family).
    pub strain: Tensor2,
    /// Generalized Kirchhoff stress S or first Piola-Kirchhoff sigma.
    pub stress: Tensor2,
    /// Per-node force kernel: Linv : S (generalized) or sigma * Kinv
    /// (original); bond forces are linear in it.
    pub kernel: Tensor2,
}

/// A discretized peridynamic body: grid, families, cached shape tensors, and
/// the material. Immutable during a solve; shareable across threads.
#[derive(Debug, Clone)]
pub struct Body {
    pub nodes: NodeSet,
    pub families: FamilyMap,
    pub geometry: Vec<NodalGeometry>,
    pub material: MaterialSpec,
}

impl Body {
    pub fn new(nodes: NodeSet, families: FamilyMap, material: MaterialSpec) -> Result<Self> {
        let geometry = kinematics::precompute_geometry(&nodes, &families)?;
        Ok(Body {
            nodes,
            families,
            geometry,
            material,
        })
    }

    pub fn dim(&self) -> usize {
        self.nodes.dim
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn nodal_state(&self, i: usize, positions: &[[f64; 3]]) -> Result<NodalState> {
        let dim = self.nodes.dim;
        let bonds = self.families.family(i);
        let ys = deformed_bonds(i, bonds, positions);
        let x = &self.nodes.positions[i];
        match self.material.family {
            ModelFamily::Generalized(m) => {
                let strain = kinematics::seth_hill_strain(
                    i,
                    dim,
                    bonds,
                    &ys,
                    &self.nodes.volumes,
                    &self.geometry[i].l_inv,
                    m,
                )?;
                let stress = stress_generalized(&strain, &self.material.law, x)?;
                let kernel = self.geometry[i].l_inv.double_contract(&stress)?;
                Ok(NodalState {
                    strain,
                    stress,
                    kernel,
                })
            }
            ModelFamily::Silling => {
                let f_bar = kinematics::def_grad_bar(
                    dim,
                    bonds,
                    &ys,
                    &self.nodes.volumes,
                    &self.geometry[i].k_inv,
                );
                let sigma = first_pk_silling(&f_bar, &self.material.law, x)?;
                let kernel = sigma.matmul(&self.geometry[i].k_inv);
                Ok(NodalState {
                    strain: f_bar.sub(&Tensor2::identity(dim)),
                    stress: sigma,
                    kernel,
                })
            }
        }
    }

    /// Phase 1: nodal strains, stresses, and force kernels.
    pub fn nodal_states(&self, positions: &[[f64; 3]]) -> Result<Vec<NodalState>> {
        exec::try_map_indexed(self.n_nodes(), |i| self.nodal_state(i, positions))
    }

    pub fn nodal_states_serial(&self, positions: &[[f64; 3]]) -> Result<Vec<NodalState>> {
        exec::try_map_indexed_seq(self.n_nodes(), |i| self.nodal_state(i, positions))
    }

    /// Internal force density at one node, phase 2 of the assembly:
    /// `f(X) = sum_bonds (T[xi][X] - T[-xi][X + xi]) dV`.
    pub fn internal_force_at(
        &self,
        i: usize,
        states: &[NodalState],
        positions: &[[f64; 3]],
    ) -> Result<[f64; 3]> {
        let bonds = self.families.family(i);
        let x0 = positions[i];
        let mut f = [0.0; 3];
        match self.material.family {
            ModelFamily::Generalized(m) => {
                for b in bonds {
                    let j = b.neighbor as usize;
                    let y = [
                        positions[j][0] - x0[0],
                        positions[j][1] - x0[1],
                        positions[j][2] - x0[2],
                    ];
                    // T[xi][X] - T[-xi][X+xi] with Y[-xi][X+xi] = -Y and the
                    // neighbor's kernel: both terms share the same bond factor
                    let pair = states[i].kernel.add(&states[j].kernel);
                    let t = force_state_generalized_kernel(b, &y, &pair, m, i)?;
                    let dv = self.nodes.volumes[j];
                    f[0] += t[0] * dv;
                    f[1] += t[1] * dv;
                    f[2] += t[2] * dv;
                }
            }
            ModelFamily::Silling => {
                for b in bonds {
                    let j = b.neighbor as usize;
                    let pair = states[i].kernel.add(&states[j].kernel);
                    let v = pair.mul_vec(&b.xi);
                    let s = b.weight * self.nodes.volumes[j];
                    f[0] += s * v[0];
                    f[1] += s * v[1];
                    f[2] += s * v[2];
                }
            }
        }
        Ok(f)
    }

    /// Assembled internal force densities for all nodes (parallel two-phase).
    pub fn internal_forces(&self, positions: &[[f64; 3]]) -> Result<Vec<[f64; 3]>> {
        let states = self.nodal_states(positions)?;
        exec::try_map_indexed(self.n_nodes(), |i| {
            self.internal_force_at(i, &states, positions)
        })
    }

    /// Sequential reference path for the assembly.
    pub fn internal_forces_serial(&self, positions: &[[f64; 3]]) -> Result<Vec<[f64; 3]>> {
        let states = self.nodal_states_serial(positions)?;
        exec::try_map_indexed_seq(self.n_nodes(), |i| {
            self.internal_force_at(i, &states, positions)
        })
    }

    /// Total strain energy (generalized family only).
    pub fn strain_energy(&self, positions: &[[f64; 3]]) -> Result<f64> {
        match self.material.family {
            ModelFamily::Generalized(_) => {
                let states = self.nodal_states(positions)?;
                Ok((0..self.n_nodes())
                    .map(|i| {
                        energy_density(&states[i].strain, &self.material.law, &self.nodes.positions[i])
                            * self.nodes.volumes[i]
                    })
                    .sum())
            }
            ModelFamily::Silling => Err(Error::ContractViolation(
                "strain energy is tracked for the generalized family only".into(),
            )),
        }
    }

    /// Characteristic force-density scale: modulus / horizon-equivalent length.
    pub fn force_scale(&self) -> f64 {
        self.material.law.modulus_scale() / self.nodes.dx
    }
}
