//! Minimal dense linear algebra: LU solves for Newton systems and small
//! symmetric eigenvalue extraction for stability blocks.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone)]
pub struct Mat {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Mat {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n_rows)
            .map(|i| {
                (0..self.n_cols)
                    .map(|j| self.get(i, j).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Solves `a x = b` in place by LU with partial pivoting. `a` is destroyed,
/// `b` is replaced by the solution. Fails on an effectively zero pivot.
pub fn lu_solve(a: &mut Mat, b: &mut [f64]) -> Result<()> {
    let n = a.n_rows;
    if a.n_cols != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "lu_solve: {}x{} with rhs {}",
            a.n_rows,
            a.n_cols,
            b.len()
        )));
    }
    let scale = a.norm_inf().max(f64::MIN_POSITIVE);
    for col in 0..n {
        // pivot
        let mut p = col;
        let mut pmax = a.get(col, col).abs();
        for r in col + 1..n {
            let v = a.get(r, col).abs();
            if v > pmax {
                pmax = v;
                p = r;
            }
        }
        if pmax < 1e-14 * scale {
            return Err(Error::ContractViolation(format!(
                "singular matrix in LU at column {col} (pivot {pmax:.3e})"
            )));
        }
        if p != col {
            for j in 0..n {
                let tmp = a.get(col, j);
                a.set(col, j, a.get(p, j));
                a.set(p, j, tmp);
            }
            b.swap(col, p);
        }
        let inv = 1.0 / a.get(col, col);
        for r in col + 1..n {
            let f = a.get(r, col) * inv;
            if f == 0.0 {
                continue;
            }
            a.set(r, col, 0.0);
            for j in col + 1..n {
                let v = a.get(r, j) - f * a.get(col, j);
                a.set(r, j, v);
            }
            b[r] -= f * b[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a.get(i, j) * b[j];
        }
        b[i] = s / a.get(i, i);
    }
    Ok(())
}

/// Solves `a x = b`, retrying with a diagonal shift `-tau I` when the plain
/// factorization hits a zero pivot (near-singular tangent with zero-energy
/// directions). Returns the solution and whether regularization was used.
pub fn solve_regularized(a: &Mat, b: &[f64], tau_rel: f64) -> Result<(Vec<f64>, bool)> {
    let mut a0 = a.clone();
    let mut x = b.to_vec();
    if lu_solve(&mut a0, &mut x).is_ok() && x.iter().all(|v| v.is_finite()) {
        return Ok((x, false));
    }
    let tau = tau_rel * a.norm_inf().max(f64::MIN_POSITIVE);
    let mut a1 = a.clone();
    for i in 0..a.n_rows {
        let v = a1.get(i, i) - tau;
        a1.set(i, i, v);
    }
    let mut x1 = b.to_vec();
    lu_solve(&mut a1, &mut x1)?;
    Ok((x1, true))
}

/// Inverts a small (n <= 9) matrix by Gauss-Jordan with partial pivoting.
pub fn invert_small(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    debug_assert!(a.len() == n * n);
    let mut work = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let mut p = col;
        let mut pmax = work[col * n + col].abs();
        for r in col + 1..n {
            let v = work[r * n + col].abs();
            if v > pmax {
                pmax = v;
                p = r;
            }
        }
        if pmax < 1e-300 * scale.max(1.0) || pmax == 0.0 {
            return None;
        }
        if p != col {
            for j in 0..n {
                work.swap(col * n + j, p * n + j);
                inv.swap(col * n + j, p * n + j);
            }
        }
        let d = 1.0 / work[col * n + col];
        for j in 0..n {
            work[col * n + j] *= d;
            inv[col * n + j] *= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = work[r * n + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                work[r * n + j] -= f * work[col * n + j];
                inv[r * n + j] -= f * inv[col * n + j];
            }
        }
    }
    if inv.iter().all(|v| v.is_finite()) {
        Some(inv)
    } else {
        None
    }
}

/// 1-norm (maximum absolute column sum) of a small matrix.
pub fn one_norm(n: usize, a: &[f64]) -> f64 {
    (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
/// Returned sorted ascending. Intended for n <= 6.
pub fn sym_eigvals(n: usize, a: &[f64]) -> Vec<f64> {
    sym_eig(n, a).0
}

/// Eigen decomposition of a small symmetric matrix by cyclic Jacobi
/// rotations: eigenvalues ascending plus column-major eigenvectors.
pub fn sym_eig(n: usize, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    debug_assert!(a.len() == n * n);
    let mut m = a.to_vec();
    // symmetrize to guard against roundoff asymmetry in FD blocks
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = s;
            m[j * n + i] = s;
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i * n + j].abs();
            }
        }
        let scale = (0..n).map(|i| m[i * n + i].abs()).fold(0.0, f64::max);
        if off <= 1e-15 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[x * n + x].partial_cmp(&m[y * n + y]).unwrap());
    let eig: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vecs[row * n + col] = v[row * n + src];
        }
    }
    (eig, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let mut a = Mat::zeros(3, 3);
        let vals = [[4.0, 1.0, 0.0], [1.0, 3.0, -1.0], [0.0, -1.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                a.set(i, j, vals[i][j]);
            }
        }
        let x_true = [1.0, -2.0, 3.0];
        let mut b = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i] += vals[i][j] * x_true[j];
            }
        }
        lu_solve(&mut a, &mut b).unwrap();
        for i in 0..3 {
            assert!((b[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn lu_reports_singular() {
        let mut a = Mat::zeros(2, 2);
        a.set(0, 0, 1.0);
        a.set(0, 1, 2.0);
        a.set(1, 0, 2.0);
        a.set(1, 1, 4.0);
        let mut b = [1.0, 2.0];
        assert!(lu_solve(&mut a, &mut b).is_err());
    }

    #[test]
    fn regularized_solve_handles_zero_modes() {
        // rank-1 symmetric matrix: plain LU fails, shifted solve succeeds
        let mut a = Mat::zeros(2, 2);
        a.set(0, 0, 1.0);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        a.set(1, 1, 1.0);
        let (x, regularized) = solve_regularized(&a, &[1.0, 1.0], 1e-6).unwrap();
        assert!(regularized);
        assert!(x.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn small_inverse_round_trips() {
        let a = [2.0, 1.0, 0.5, 1.0, 3.0, 0.0, 0.5, 0.0, 1.5];
        let inv = invert_small(3, &a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += a[i * 3 + k] * inv[k * 3 + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn jacobi_eigenvalues_match_known_spectrum() {
        // eigenvalues of [[2,1,0],[1,2,1],[0,1,2]] are 2 and 2 +- sqrt(2)
        let a = [2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0];
        let eig = sym_eigvals(3, &a);
        let expect = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (e, x) in eig.iter().zip(expect.iter()) {
            assert!((e - x).abs() < 1e-12, "{e} vs {x}");
        }
    }
}
