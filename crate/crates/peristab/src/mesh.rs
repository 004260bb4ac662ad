//! Uniform grids, horizon families, influence weights, and boundary regions.
//!
//! Neighbor search is direct lattice-offset enumeration with exact integer
//! arithmetic on the offsets (p^2 + q^2 + r^2 <= N^2), so family membership
//! reproduces the discrete sums of the stability analysis without
//! floating-point boundary ambiguity. No partial-volume correction is applied
//! near |xi| = delta; the discrete sums use full nodal volumes.

use crate::error::{Error, Result};
use std::sync::Arc;

/// Uniform grid description. `extents` must be positive multiples of `dx`;
/// `cross_section` is the bar area A in 1D, the thickness b in 2D, and 1 in 3D.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub dim: usize,
    pub extents: [f64; 3],
    pub dx: f64,
    pub cross_section: f64,
}

/// Reference positions, nodal volumes, and grid metadata.
#[derive(Debug, Clone)]
pub struct NodeSet {
    pub dim: usize,
    pub positions: Vec<[f64; 3]>,
    pub volumes: Vec<f64>,
    pub dx: f64,
    pub counts: [usize; 3],
    pub cross_section: f64,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Grid coordinates of node `id` (x index fastest).
    pub fn grid_coords(&self, id: usize) -> [usize; 3] {
        let nx = self.counts[0];
        let ny = self.counts[1].max(1);
        [id % nx, (id / nx) % ny, id / (nx * ny)]
    }

    pub fn node_id(&self, c: [usize; 3]) -> usize {
        let nx = self.counts[0];
        let ny = self.counts[1].max(1);
        (c[2] * ny + c[1]) * nx + c[0]
    }
}

/// Radial influence weight.
#[derive(Clone)]
pub enum InfluenceKind {
    /// omega = 1 inside the horizon, 0 outside.
    Step,
    /// User-supplied spherical weight omega(|xi|) >= 0.
    Radial(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for InfluenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InfluenceKind::Step => write!(f, "Step"),
            InfluenceKind::Radial(_) => write!(f, "Radial(..)"),
        }
    }
}

/// Spherical influence specification: weight kind plus horizon radius.
#[derive(Debug, Clone)]
pub struct InfluenceSpec {
    pub kind: InfluenceKind,
    pub horizon: f64,
}

impl InfluenceSpec {
    pub fn step(horizon: f64) -> Self {
        InfluenceSpec {
            kind: InfluenceKind::Step,
            horizon,
        }
    }

    pub fn weight(&self, r: f64) -> f64 {
        match &self.kind {
            InfluenceKind::Step => {
                if r <= self.horizon {
                    1.0
                } else {
                    0.0
                }
            }
            InfluenceKind::Radial(f) => f(r),
        }
    }
}

/// One bond of a family: neighbor id, reference bond vector, length, weight.
#[derive(Debug, Clone, Copy)]
pub struct Bond {
    pub neighbor: u32,
    pub xi: [f64; 3],
    pub len: f64,
    pub weight: f64,
}

/// Per-node bond lists in CSR layout, plus the index of each bond's reverse
/// (the J -> I bond) for force assembly.
#[derive(Debug, Clone)]
pub struct FamilyMap {
    offsets: Vec<usize>,
    bonds: Vec<Bond>,
    reverse: Vec<u32>,
}

impl FamilyMap {
    pub fn family(&self, node: usize) -> &[Bond] {
        &self.bonds[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn family_range(&self, node: usize) -> std::ops::Range<usize> {
        self.offsets[node]..self.offsets[node + 1]
    }

    pub fn bond(&self, idx: usize) -> &Bond {
        &self.bonds[idx]
    }

    /// Index (into the flat bond array) of the reverse bond of `idx`.
    pub fn reverse_of(&self, idx: usize) -> usize {
        self.reverse[idx] as usize
    }

    pub fn n_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub fn max_family_size(&self) -> usize {
        (0..self.offsets.len() - 1)
            .map(|i| self.offsets[i + 1] - self.offsets[i])
            .max()
            .unwrap_or(0)
    }

    /// Interior test: family has the full lattice count.
    pub fn is_full(&self, node: usize, full_count: usize) -> bool {
        self.offsets[node + 1] - self.offsets[node] == full_count
    }
}

/// Builds a uniform cell-centered grid.
pub fn build_grid(spec: &GridSpec) -> Result<NodeSet> {
    if !(1..=3).contains(&spec.dim) {
        return Err(Error::Config(format!("dim must be 1..3, got {}", spec.dim)));
    }
    if !(spec.dx > 0.0) || !(spec.cross_section > 0.0) {
        return Err(Error::Config("dx and cross_section must be positive".into()));
    }
    let mut counts = [1usize; 3];
    for axis in 0..spec.dim {
        let ratio = spec.extents[axis] / spec.dx;
        let n = ratio.round();
        if !(spec.extents[axis] > 0.0) || (ratio - n).abs() > 1e-9 * n.max(1.0) || n < 1.0 {
            return Err(Error::Config(format!(
                "extent {} along axis {axis} is not a positive multiple of dx {}",
                spec.extents[axis], spec.dx
            )));
        }
        counts[axis] = n as usize;
    }
    let total: usize = counts.iter().product();
    let cell_volume = match spec.dim {
        1 => spec.cross_section * spec.dx,
        2 => spec.cross_section * spec.dx * spec.dx,
        _ => spec.dx * spec.dx * spec.dx,
    };
    let mut positions = Vec::with_capacity(total);
    for k in 0..counts[2] {
        for j in 0..counts[1] {
            for i in 0..counts[0] {
                let mut p = [0.0; 3];
                let c = [i, j, k];
                for axis in 0..spec.dim {
                    p[axis] = (c[axis] as f64 + 0.5) * spec.dx;
                }
                positions.push(p);
            }
        }
    }
    Ok(NodeSet {
        dim: spec.dim,
        positions,
        volumes: vec![cell_volume; total],
        dx: spec.dx,
        counts,
        cross_section: spec.cross_section,
    })
}

/// Integer lattice offsets with 0 < p^2+q^2+r^2 <= n^2, restricted to the
/// active dimension, in a fixed deterministic order.
pub fn lattice_offsets(dim: usize, n: i64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    let (qr, rr) = (dim >= 2, dim >= 3);
    for r in if rr { -n..=n } else { 0..=0 } {
        for q in if qr { -n..=n } else { 0..=0 } {
            for p in -n..=n {
                let d2 = p * p + q * q + r * r;
                if d2 == 0 || d2 > n * n {
                    continue;
                }
                out.push([p, q, r]);
            }
        }
    }
    out
}

/// Builds per-node families within the horizon. The point itself is excluded;
/// every bond satisfies 0 < |xi| <= delta.
pub fn build_families(nodes: &NodeSet, infl: &InfluenceSpec) -> Result<FamilyMap> {
    let dx = nodes.dx;
    if infl.horizon < dx {
        return Err(Error::Config(format!(
            "horizon {} smaller than grid spacing {dx}: families would be empty",
            infl.horizon
        )));
    }
    let ratio = infl.horizon / dx;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * n {
        return Err(Error::Config(format!(
            "horizon {} is not an integer multiple of dx {dx}",
            infl.horizon
        )));
    }
    let offsets_list = lattice_offsets(nodes.dim, n as i64);

    let mut offsets = Vec::with_capacity(nodes.len() + 1);
    let mut bonds = Vec::new();
    offsets.push(0);
    for id in 0..nodes.len() {
        let c = nodes.grid_coords(id);
        for off in &offsets_list {
            let mut ok = true;
            let mut nc = [0usize; 3];
            for axis in 0..3 {
                let v = c[axis] as i64 + off[axis];
                if v < 0 || v >= nodes.counts[axis] as i64 {
                    ok = false;
                    break;
                }
                nc[axis] = v as usize;
            }
            if !ok {
                continue;
            }
            let nid = nodes.node_id(nc);
            let xi = [
                off[0] as f64 * dx,
                off[1] as f64 * dx,
                off[2] as f64 * dx,
            ];
            let len = ((off[0] * off[0] + off[1] * off[1] + off[2] * off[2]) as f64).sqrt() * dx;
            bonds.push(Bond {
                neighbor: nid as u32,
                xi,
                len,
                weight: infl.weight(len),
            });
        }
        // sorted neighbor ids make the reverse lookup a binary search
        let start = *offsets.last().unwrap();
        bonds[start..].sort_by_key(|b| b.neighbor);
        offsets.push(bonds.len());
    }

    let mut reverse = vec![0u32; bonds.len()];
    for i in 0..nodes.len() {
        for idx in offsets[i]..offsets[i + 1] {
            let j = bonds[idx].neighbor as usize;
            let fam = &bonds[offsets[j]..offsets[j + 1]];
            let pos = fam
                .binary_search_by_key(&(i as u32), |b| b.neighbor)
                .map_err(|_| {
                    Error::ContractViolation(format!(
                        "family of node {j} lacks the reverse bond to node {i}"
                    ))
                })?;
            reverse[idx] = (offsets[j] + pos) as u32;
        }
    }

    Ok(FamilyMap {
        offsets,
        bonds,
        reverse,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Negative,
    Positive,
}

/// Node ids of the `layers` grid planes nearest the given face.
pub fn boundary_region(
    nodes: &NodeSet,
    axis: usize,
    side: Side,
    layers: usize,
) -> Result<Vec<usize>> {
    if axis >= nodes.dim {
        return Err(Error::Config(format!(
            "axis {axis} out of range for dim {}",
            nodes.dim
        )));
    }
    if layers == 0 || layers > nodes.counts[axis] {
        return Err(Error::Config(format!(
            "layers {layers} invalid for {} planes along axis {axis}",
            nodes.counts[axis]
        )));
    }
    let n = nodes.counts[axis];
    let ids = (0..nodes.len())
        .filter(|&id| {
            let c = nodes.grid_coords(id)[axis];
            match side {
                Side::Negative => c < layers,
                Side::Positive => c >= n - layers,
            }
        })
        .collect();
    Ok(ids)
}

/// Discrete weighted volume sum(omega * dV) of one node's family.
pub fn weighted_volume(nodes: &NodeSet, families: &FamilyMap, node: usize) -> f64 {
    families
        .family(node)
        .iter()
        .map(|b| b.weight * nodes.volumes[b.neighbor as usize])
        .sum()
}
