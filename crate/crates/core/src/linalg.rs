//! Minimal dense complex matrices and a cyclic Jacobi eigensolver for
//! Hermitian matrices. Sizes here stay small (two-mode photon-number blocks,
//! truncated single-mode operators, CMA-ES covariances), so a hand-rolled
//! O(n^3)-per-sweep Jacobi is plenty.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float as _;

use crate::C64;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CMatrix { n_rows, n_cols, data: vec![C64::new(0.0, 0.0); n_rows * n_cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n_cols, rhs.n_rows);
        let mut out = Self::zeros(self.n_rows, rhs.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.n_cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.n_cols, v.len());
        let mut out = vec![C64::new(0.0, 0.0); self.n_rows];
        for i in 0..self.n_rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.n_cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Largest |entry| of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n_cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n_cols + j]
    }
}

/// Eigendecomposition `A = V diag(w) V^dag` of a Hermitian matrix.
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors.
    pub eigenvectors: CMatrix,
}

/// Cyclic Jacobi for a Hermitian matrix. The input is symmetrized from its
/// lower triangle, so tiny Hermiticity violations from rounding are harmless.
pub fn hermitian_eigen(a: &CMatrix) -> HermitianEigen {
    let n = a.n_rows;
    assert_eq!(n, a.n_cols);
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in 0..i {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let scale: f64 = m.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // unitary: U[p][p]=c, U[p][q]=-s*phase, U[q][p]=s*conj(phase), U[q][q]=c
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp + s * phase.conj() * akq;
                    m[(k, q)] = -s * phase * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk + s * phase * aqk;
                    m[(q, k)] = -s * phase.conj() * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp + s * phase.conj() * vkq;
                    v[(k, q)] = -s * phase * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let eig_raw: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| eig_raw[i].partial_cmp(&eig_raw[j]).unwrap());
    let mut vectors = CMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (new, &old) in order.iter().enumerate() {
        eigenvalues.push(eig_raw[old]);
        for k in 0..n {
            vectors[(k, new)] = v[(k, old)];
        }
    }
    HermitianEigen { eigenvalues, eigenvectors: vectors }
}

/// exp(M) for anti-Hermitian M (i.e. M^dag = -M), via the Hermitian
/// eigendecomposition of iM.
pub fn expm_anti_hermitian(m: &CMatrix) -> CMatrix {
    let n = m.n_rows;
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = C64::new(0.0, 1.0) * m[(i, j)];
        }
    }
    let eig = hermitian_eigen(&h);
    // exp(M) = exp(-iH) = V diag(e^{-i w}) V^dag
    let mut d = CMatrix::zeros(n, n);
    for (k, w) in eig.eigenvalues.iter().enumerate() {
        d[(k, k)] = C64::new(0.0, -w).exp();
    }
    eig.eigenvectors.matmul(&d).matmul(&eig.eigenvectors.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes_random_hermitian() {
        // deterministic pseudo-random Hermitian matrix
        let n = 12;
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut a = CMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = C64::new(next() * 4.0, 0.0);
            for j in 0..i {
                let z = C64::new(next(), next());
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        let eig = hermitian_eigen(&a);
        let mut d = CMatrix::zeros(n, n);
        for (k, w) in eig.eigenvalues.iter().enumerate() {
            d[(k, k)] = C64::new(*w, 0.0);
        }
        let rec = eig.eigenvectors.matmul(&d).matmul(&eig.eigenvectors.adjoint());
        assert!(rec.max_abs_diff(&a) < 1e-12);
        // orthonormal eigenvectors
        let g = eig.eigenvectors.adjoint().matmul(&eig.eigenvectors);
        assert!(g.max_abs_diff(&CMatrix::identity(n)) < 1e-12);
    }

    #[test]
    fn expm_matches_pauli_rotation() {
        // exp(i t sigma_x) = cos t + i sin t sigma_x
        let t = 0.7373;
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(0.0, t);
        m[(1, 0)] = C64::new(0.0, t);
        let e = expm_anti_hermitian(&m);
        assert!((e[(0, 0)] - C64::new(t.cos(), 0.0)).norm() < 1e-14);
        assert!((e[(0, 1)] - C64::new(0.0, t.sin())).norm() < 1e-14);
    }
}
