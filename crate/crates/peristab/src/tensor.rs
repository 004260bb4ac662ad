//! Dense second- and fourth-order tensors in d = 1, 2, 3.
//!
//! Fourth-order tensors built from bond moments carry full index symmetry;
//! inversion on the space of symmetric second-order tensors is performed in
//! the Mandel (orthonormal) basis, where the matrix inverse maps back exactly.

use crate::error::{Error, Result};
use crate::linalg;

/// Default condition-number cap before a shape tensor is declared singular.
/// Uniform-grid shape tensors are far better conditioned; anything near the
/// cap indicates a degenerate family.
pub const COND_CAP: f64 = 1e12;

/// Mandel pair ordering per dimension: diagonal pairs first, then the
/// off-diagonal pairs scaled by sqrt(2).
fn mandel_pairs(dim: usize) -> &'static [(usize, usize)] {
    match dim {
        1 => &[(0, 0)],
        2 => &[(0, 0), (1, 1), (0, 1)],
        3 => &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)],
        _ => unreachable!("dim must be 1, 2, or 3"),
    }
}

/// Dimension of the Mandel space: d(d+1)/2.
pub fn mandel_dim(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Second-order tensor, stored row-major in a fixed 3x3 block; entries
/// outside the active `dim x dim` window stay zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor2 {
    dim: usize,
    a: [f64; 9],
}

impl Tensor2 {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=3).contains(&dim));
        Tensor2 { dim, a: [0.0; 9] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            t.set(i, i, 1.0);
        }
        t
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                t.set(i, j, f(i, j));
            }
        }
        t
    }

    /// Outer product u (x) v restricted to the first `dim` components.
    pub fn outer(dim: usize, u: &[f64; 3], v: &[f64; 3]) -> Self {
        Self::from_fn(dim, |i, j| u[i] * v[j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * 3 + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * 3 + j] = v;
    }

    #[inline]
    pub fn add_assign_scaled(&mut self, other: &Tensor2, s: f64) {
        for k in 0..9 {
            self.a[k] += s * other.a[k];
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for v in out.a.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &Tensor2) -> Self {
        let mut out = *self;
        out.add_assign_scaled(other, 1.0);
        out
    }

    pub fn sub(&self, other: &Tensor2) -> Self {
        let mut out = *self;
        out.add_assign_scaled(other, -1.0);
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Tensor2) -> Self {
        Self::from_fn(self.dim, |i, j| {
            (0..self.dim).map(|k| self.get(i, k) * other.get(k, j)).sum()
        })
    }

    /// Matrix-vector product on the active window.
    pub fn mul_vec(&self, v: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[i] += self.get(i, j) * v[j];
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn det(&self) -> f64 {
        match self.dim {
            1 => self.get(0, 0),
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            _ => {
                self.get(0, 0) * (self.get(1, 1) * self.get(2, 2) - self.get(1, 2) * self.get(2, 1))
                    - self.get(0, 1)
                        * (self.get(1, 0) * self.get(2, 2) - self.get(1, 2) * self.get(2, 0))
                    + self.get(0, 2)
                        * (self.get(1, 0) * self.get(2, 1) - self.get(1, 1) * self.get(2, 0))
            }
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.norm_inf().max(1e-300);
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                if (self.get(i, j) - self.get(j, i)).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    pub fn sym(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }

    /// Dense inverse of the active window.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.dim;
        let mut flat = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                flat[i * d + j] = self.get(i, j);
            }
        }
        let inv = linalg::invert_small(d, &flat).ok_or(Error::SingularShapeTensor {
            cond: f64::INFINITY,
            cap: COND_CAP,
        })?;
        Ok(Self::from_fn(d, |i, j| inv[i * d + j]))
    }

    /// 1-norm condition number of the active window.
    pub fn cond(&self) -> f64 {
        let d = self.dim;
        let mut flat = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                flat[i * d + j] = self.get(i, j);
            }
        }
        match linalg::invert_small(d, &flat) {
            Some(inv) => linalg::one_norm(d, &flat) * linalg::one_norm(d, &inv),
            None => f64::INFINITY,
        }
    }

    /// Mandel vector of a symmetric tensor.
    pub fn mandel_vec(&self) -> Vec<f64> {
        mandel_pairs(self.dim)
            .iter()
            .map(|&(i, j)| {
                if i == j {
                    self.get(i, j)
                } else {
                    SQRT_2 * 0.5 * (self.get(i, j) + self.get(j, i))
                }
            })
            .collect()
    }

    pub fn from_mandel_vec(dim: usize, v: &[f64]) -> Self {
        let mut t = Self::zeros(dim);
        for (idx, &(i, j)) in mandel_pairs(dim).iter().enumerate() {
            if i == j {
                t.set(i, j, v[idx]);
            } else {
                let x = v[idx] / SQRT_2;
                t.set(i, j, x);
                t.set(j, i, x);
            }
        }
        t
    }

    pub fn max_abs_diff(&self, other: &Tensor2) -> f64 {
        self.a
            .iter()
            .zip(other.a.iter())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

/// Fourth-order tensor on d-dimensional space, stored as the full d^4 array.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    a: [f64; 81],
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=3).contains(&dim));
        Tensor4 { dim, a: [0.0; 81] }
    }

    /// Symmetric fourth-order identity: I_ijkl = (d_ik d_jl + d_il d_jk)/2,
    /// the identity map on symmetric second-order tensors.
    pub fn identity_sym(dim: usize) -> Self {
        Self::from_fn(dim, |i, j, k, l| {
            let a = if i == k && j == l { 0.5 } else { 0.0 };
            let b = if i == l && j == k { 0.5 } else { 0.0 };
            a + b
        })
    }

    /// Isotropic tensor c1 * d_ij d_kl + c2 * (d_ik d_jl + d_il d_jk).
    pub fn isotropic(dim: usize, c1: f64, c2: f64) -> Self {
        Self::from_fn(dim, |i, j, k, l| {
            let mut v = 0.0;
            if i == j && k == l {
                v += c1;
            }
            if i == k && j == l {
                v += c2;
            }
            if i == l && j == k {
                v += c2;
            }
            v
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        t.set(i, j, k, l, f(i, j, k, l));
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.a[((i * 3 + j) * 3 + k) * 3 + l]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.a[((i * 3 + j) * 3 + k) * 3 + l] = v;
    }

    #[inline]
    pub fn add_scaled_outer4(&mut self, n: &[f64; 3], s: f64) {
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    for l in 0..self.dim {
                        self.a[((i * 3 + j) * 3 + k) * 3 + l] += s * n[i] * n[j] * n[k] * n[l];
                    }
                }
            }
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in out.a.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn norm_inf(&self) -> f64 {
        self.a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Tensor4) -> f64 {
        self.a
            .iter()
            .zip(other.a.iter())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    /// Full index symmetry under any permutation of (i,j,k,l); holds for
    /// tensors assembled from xi (x) xi (x) xi (x) xi integrands.
    pub fn is_fully_symmetric(&self, tol: f64) -> bool {
        let scale = self.norm_inf().max(1e-300);
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let v = self.get(i, j, k, l);
                        for &w in &[
                            self.get(j, i, k, l),
                            self.get(i, j, l, k),
                            self.get(k, l, i, j),
                            self.get(i, k, j, l),
                        ] {
                            if (v - w).abs() > tol * scale {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Double contraction (A : B)_ij = A_ijkl B_kl with symmetric B.
    pub fn double_contract(&self, b: &Tensor2) -> Result<Tensor2> {
        if self.dim != b.dim() {
            return Err(Error::DimensionMismatch(format!(
                "double_contract: tensor4 dim {} vs tensor2 dim {}",
                self.dim,
                b.dim()
            )));
        }
        if !b.is_symmetric(1e-12) {
            return Err(Error::ContractViolation(
                "double_contract requires a symmetric second-order operand".into(),
            ));
        }
        let d = self.dim;
        Ok(Tensor2::from_fn(d, |i, j| {
            let mut s = 0.0;
            for k in 0..d {
                for l in 0..d {
                    s += self.get(i, j, k, l) * b.get(k, l);
                }
            }
            s
        }))
    }

    /// Trace contraction T_pq = A_pqii.
    pub fn trace_contract(&self) -> Tensor2 {
        Tensor2::from_fn(self.dim, |p, q| {
            (0..self.dim).map(|i| self.get(p, q, i, i)).sum()
        })
    }

    /// Mandel matrix of a minor-symmetric tensor (s x s, s = d(d+1)/2).
    pub fn mandel_matrix(&self) -> Vec<f64> {
        let pairs = mandel_pairs(self.dim);
        let s = pairs.len();
        let mut m = vec![0.0; s * s];
        for (a, &(i, j)) in pairs.iter().enumerate() {
            for (b, &(k, l)) in pairs.iter().enumerate() {
                let mut f = 1.0;
                if i != j {
                    f *= SQRT_2;
                }
                if k != l {
                    f *= SQRT_2;
                }
                m[a * s + b] = f * self.get(i, j, k, l);
            }
        }
        m
    }

    pub fn from_mandel_matrix(dim: usize, m: &[f64]) -> Self {
        let pairs = mandel_pairs(dim);
        let s = pairs.len();
        let mut t = Self::zeros(dim);
        for (a, &(i, j)) in pairs.iter().enumerate() {
            for (b, &(k, l)) in pairs.iter().enumerate() {
                let mut f = 1.0;
                if i != j {
                    f *= SQRT_2;
                }
                if k != l {
                    f *= SQRT_2;
                }
                let v = m[a * s + b] / f;
                t.set(i, j, k, l, v);
                t.set(j, i, k, l, v);
                t.set(i, j, l, k, v);
                t.set(j, i, l, k, v);
            }
        }
        t
    }

    /// Inverse on the space of symmetric second-order tensors, computed in
    /// Mandel form. Fails with `SingularShapeTensor` when the Mandel matrix
    /// condition number exceeds `cond_cap`.
    pub fn invert_sym4(&self, cond_cap: f64) -> Result<Tensor4> {
        let s = mandel_dim(self.dim);
        let m = self.mandel_matrix();
        let inv = linalg::invert_small(s, &m).ok_or(Error::SingularShapeTensor {
            cond: f64::INFINITY,
            cap: cond_cap,
        })?;
        let cond = linalg::one_norm(s, &m) * linalg::one_norm(s, &inv);
        if !cond.is_finite() || cond > cond_cap {
            return Err(Error::SingularShapeTensor {
                cond,
                cap: cond_cap,
            });
        }
        Ok(Self::from_mandel_matrix(self.dim, &inv))
    }
}

/// The 15-term Kronecker-delta symbol gamma_ijklrs arising in the sixth-moment
/// decomposition of lattice sums. Indices are zero-based; returns 0 or 1.
pub fn gamma6(i: usize, j: usize, k: usize, l: usize, r: usize, s: usize) -> f64 {
    #[inline]
    fn d(a: usize, b: usize) -> f64 {
        if a == b {
            1.0
        } else {
            0.0
        }
    }
    d(i, j) * d(j, k) * d(k, l) * d(r, s) * (1.0 - d(i, s))
        + d(i, j) * d(j, k) * d(k, r) * d(l, s) * (1.0 - d(i, s))
        + d(i, j) * d(j, l) * d(l, r) * d(k, s) * (1.0 - d(i, s))
        + d(i, k) * d(k, l) * d(l, r) * d(j, s) * (1.0 - d(i, s))
        + d(j, k) * d(k, l) * d(l, r) * d(i, s) * (1.0 - d(i, j))
        + d(i, j) * d(j, k) * d(k, s) * d(l, r) * (1.0 - d(i, r))
        + d(i, j) * d(j, l) * d(l, s) * d(k, r) * (1.0 - d(i, r))
        + d(i, k) * d(k, l) * d(l, s) * d(j, r) * (1.0 - d(i, r))
        + d(j, k) * d(k, l) * d(l, s) * d(i, r) * (1.0 - d(i, j))
        + d(i, j) * d(j, r) * d(r, s) * d(k, l) * (1.0 - d(i, l))
        + d(i, k) * d(k, r) * d(r, s) * d(j, l) * (1.0 - d(i, l))
        + d(j, k) * d(k, r) * d(r, s) * d(i, l) * (1.0 - d(i, j))
        + d(i, l) * d(l, r) * d(r, s) * d(j, k) * (1.0 - d(i, k))
        + d(j, l) * d(l, r) * d(r, s) * d(i, k) * (1.0 - d(i, j))
        + d(k, l) * d(l, r) * d(r, s) * d(i, j) * (1.0 - d(i, s))
}
