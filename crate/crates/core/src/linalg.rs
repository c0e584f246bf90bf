//! Small dense eigenvalue routines (cyclic Jacobi).
//!
//! Matrices here are at most a few dozen rows (4x4 polarization states,
//! 25x25 density matrices), so a plain Jacobi sweep is accurate and fast
//! enough.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::C64;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a real symmetric `n x n` matrix stored row-major, sorted
/// in descending order. Only the upper triangle needs to be meaningful if the
/// matrix is symmetric; the input is consumed as scratch.
pub fn symmetric_eigenvalues(n: usize, mut a: Vec<f64>) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut diag = 0.0;
        for p in 0..n {
            diag += a[p * n + p] * a[p * n + p];
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= 1e-30 * diag.max(1e-300) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| y.partial_cmp(x).unwrap_or(core::cmp::Ordering::Equal));
    eig
}

/// Eigenvalues of a complex hermitian `n x n` matrix (row-major), descending.
///
/// Uses the real embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is the
/// hermitian spectrum with every eigenvalue doubled.
pub fn hermitian_eigenvalues(n: usize, m: &[C64]) -> Vec<f64> {
    assert_eq!(m.len(), n * n, "matrix storage does not match dimension");
    let big = 2 * n;
    let mut a = vec![0.0; big * big];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize so tiny hermiticity defects do not bias the result.
            let z = (m[i * n + j] + m[j * n + i].conj()) * 0.5;
            a[i * big + j] = z.re;
            a[(i + n) * big + (j + n)] = z.re;
            a[i * big + (j + n)] = -z.im;
            a[(i + n) * big + j] = z.im;
        }
    }
    let doubled = symmetric_eigenvalues(big, a);
    doubled.into_iter().step_by(2).collect()
}
