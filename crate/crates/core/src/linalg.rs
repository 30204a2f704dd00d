//! Small dense complex-matrix helpers: a cyclic Jacobi eigensolver for
//! Hermitian matrices and the reconstruction used to clamp near-zero negative
//! eigenvalues at state construction.
//!
//! Matrices are row-major `Vec<Complex64>` of size `n * n`. Nothing here is
//! tuned for large systems; registers are capped at eight qubits, so `n` is
//! at most 256.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Eigendecomposition of a Hermitian matrix.
///
/// `values[k]` pairs with the eigenvector stored in column `k` of `vectors`
/// (row-major, `vectors[i * n + k]` is component `i`). Eigenvalues are not
/// sorted.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Complex64>,
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// The input is symmetrized as `(A + A†)/2` before iterating, so tiny
/// Hermiticity violations from roundoff do not stall convergence.
pub fn hermitian_eigen(n: usize, matrix: &[Complex64]) -> HermitianEigen {
    assert_eq!(matrix.len(), n * n, "matrix shape");
    let mut a: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (matrix[i * n + j] + matrix[j * n + i].conj());
        }
    }
    let mut v: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }

    let scale: f64 = (0..n).map(|i| a[i * n + i].norm_sqr()).sum::<f64>().max(1.0);
    let tol = 1e-30 * scale;

    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * mag);
                // Smaller-magnitude root of t² - 2τt - 1 = 0.
                let t = if tau == 0.0 {
                    1.0
                } else {
                    let sign = if tau > 0.0 { 1.0 } else { -1.0 };
                    -sign / (tau.abs() + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                let sp = s * phase; // s·e^{iβ}
                let spc = s * phase.conj(); // s·e^{-iβ}

                // A ← V† A V with V = [[c, -s·e^{iβ}], [s·e^{-iβ}, c]] on (p, q).
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp + spc * akq;
                    a[k * n + q] = -sp * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk + sp * aqk;
                    a[q * n + k] = -spc * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp + spc * vkq;
                    v[k * n + q] = -sp * vkp + c * vkq;
                }
            }
        }
    }

    let values = (0..n).map(|i| a[i * n + i].re).collect();
    HermitianEigen { values, vectors: v }
}

/// Eigenvalues of a Hermitian matrix, sorted ascending.
pub fn hermitian_eigenvalues(n: usize, matrix: &[Complex64]) -> Vec<f64> {
    let mut values = hermitian_eigen(n, matrix).values;
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    values
}

/// Rebuilds `V · diag(values) · V†` from an eigendecomposition.
pub fn reconstruct(n: usize, eigen: &HermitianEigen, values: &[f64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..n {
        let lambda = values[k];
        if lambda == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = eigen.vectors[i * n + k];
            for j in 0..n {
                out[i * n + j] += lambda * vik * eigen.vectors[j * n + k].conj();
            }
        }
    }
    out
}
