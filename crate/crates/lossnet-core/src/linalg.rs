//! Small dense symmetric linear algebra: cyclic Jacobi eigenvalues, a
//! partial-pivot solver, and an orthonormal simplex-tangent basis.
//!
//! Jacobi is used everywhere eigenvalues are needed. Unlike QR-type methods
//! it keeps high *relative* accuracy on strongly graded symmetric matrices
//! (diagonal scales spanning many orders of magnitude), which the projected
//! Hessians here produce; rotation and stopping thresholds are therefore
//! relative to sqrt(|a_pp·a_qq|), not to a global norm.

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Row-major dense symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymMatrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    /// Eigenvalues (ascending) by cyclic Jacobi with locally scaled thresholds.
    pub fn jacobi_eigenvalues(&self) -> Vec<T> {
        let n = self.n;
        let mut a = self.data.clone();
        if n == 0 {
            return vec![];
        }
        if n == 1 {
            return vec![a[0]];
        }
        let stop_tol: T = T::epsilon() * real(64.0);
        let skip_tol: T = T::epsilon() * T::epsilon();
        let idx = |i: usize, j: usize| i * n + j;
        for _sweep in 0..100 {
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a[idx(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let app = a[idx(p, p)];
                    let aqq = a[idx(q, q)];
                    let local = local_scale(app, aqq);
                    if apq.abs() <= skip_tol * local {
                        a[idx(p, q)] = T::zero();
                        a[idx(q, p)] = T::zero();
                        continue;
                    }
                    if apq.abs() <= stop_tol * local {
                        continue;
                    }
                    rotated = true;
                    let theta = (aqq - app) / (real::<T>(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for r in 0..n {
                        let arp = a[idx(r, p)];
                        let arq = a[idx(r, q)];
                        a[idx(r, p)] = c * arp - s * arq;
                        a[idx(r, q)] = s * arp + c * arq;
                    }
                    for r in 0..n {
                        let apr = a[idx(p, r)];
                        let aqr = a[idx(q, r)];
                        a[idx(p, r)] = c * apr - s * aqr;
                        a[idx(q, r)] = s * apr + c * aqr;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut eig: Vec<T> = (0..n).map(|i| a[idx(i, i)]).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
        eig
    }
}

#[inline]
fn local_scale<T: Real>(app: T, aqq: T) -> T {
    let prod = app * aqq;
    if prod > T::zero() {
        prod.sqrt()
    } else {
        app.abs().max(aqq.abs()).max(T::min_positive_value())
    }
}

/// Solve A x = b by Gaussian elimination with partial pivoting.
/// A is a dense square matrix in row-major order; returns Err on a
/// numerically singular pivot.
pub fn solve_linear<T: Real>(a: &[T], b: &[T], n: usize) -> Result<Vec<T>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let mut scale = T::zero();
    for v in a {
        scale = scale.max(v.abs());
    }
    let tiny = T::epsilon() * scale.max(T::min_positive_value()) * real(16.0);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r * n + col].abs() > m[piv * n + col].abs() {
                piv = r;
            }
        }
        if m[piv * n + col].abs() <= tiny {
            return Err(Error::Domain("singular matrix in linear solve".into()));
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
            }
            x.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / d;
            if f == T::zero() {
                continue;
            }
            for c in col..n {
                let v = m[col * n + c];
                m[r * n + c] = m[r * n + c] - f * v;
            }
            x[r] = x[r] - f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for c in col + 1..n {
            acc = acc - m[col * n + c] * x[c];
        }
        x[col] = acc / m[col * n + col];
    }
    Ok(x)
}

/// Deterministic orthonormal basis of {h : Σ h_i = 0} ⊂ R^n, by modified
/// Gram–Schmidt on {e_i − e_0, i = 1..n−1}. Columns returned as rows.
pub fn simplex_tangent_basis<T: Real>(n: usize) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let mut v = vec![T::zero(); n];
        v[i] = T::one();
        v[0] = -T::one();
        for b in &basis {
            let dot = v.iter().zip(b.iter()).map(|(&x, &y)| x * y).sum::<T>();
            for (vj, bj) in v.iter_mut().zip(b.iter()) {
                *vj = *vj - dot * *bj;
            }
        }
        let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        for vj in v.iter_mut() {
            *vj = *vj / norm;
        }
        basis.push(v);
    }
    basis
}

/// Project a symmetric matrix onto a row-listed orthonormal basis: Bᵀ H B.
pub fn project_symmetric<T: Real>(h: &SymMatrix<T>, basis: &[Vec<T>]) -> SymMatrix<T> {
    let n = h.n;
    let m = basis.len();
    // tmp = H B (n×m)
    let mut tmp = vec![T::zero(); n * m];
    for i in 0..n {
        for (col, b) in basis.iter().enumerate() {
            let mut acc = T::zero();
            for j in 0..n {
                acc = acc + h.get(i, j) * b[j];
            }
            tmp[i * m + col] = acc;
        }
    }
    let mut out = SymMatrix::zeros(m);
    for r in 0..m {
        for c in r..m {
            let mut acc = T::zero();
            for i in 0..n {
                acc = acc + basis[r][i] * tmp[i * m + c];
            }
            out.set(r, c, acc);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_2x2_known() {
        let mut m = SymMatrix::zeros(2);
        m.set(0, 0, 2.0f64);
        m.set(1, 1, 2.0);
        m.set(0, 1, 1.0);
        let e = m.jacobi_eigenvalues();
        assert!((e[0] - 1.0).abs() < 1e-14);
        assert!((e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_graded_matrix_keeps_small_eigenvalue_sign() {
        // diag(1e18, 1) with coupling: small eigenvalue stays positive
        let mut m = SymMatrix::zeros(2);
        m.set(0, 0, 1e18f64);
        m.set(1, 1, 2.0);
        m.set(0, 1, 1e6);
        let e = m.jacobi_eigenvalues();
        assert!(e[0] > 0.9 && e[0] < 2.1, "small eigenvalue {}", e[0]);
    }

    #[test]
    fn solve_simple_system() {
        let a = [2.0f64, 1.0, 1.0, 3.0];
        let b = [5.0, 10.0];
        let x = solve_linear(&a, &b, 2).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn solve_rejects_singular() {
        let a = [1.0f64, 2.0, 2.0, 4.0];
        assert!(solve_linear(&a, &[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn tangent_basis_is_orthonormal_and_sums_to_zero() {
        let b = simplex_tangent_basis::<f64>(5);
        assert_eq!(b.len(), 4);
        for (i, v) in b.iter().enumerate() {
            assert!(v.iter().sum::<f64>().abs() < 1e-12);
            for (j, w) in b.iter().enumerate() {
                let dot: f64 = v.iter().zip(w.iter()).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }
}
