//! Takagi factorization `A = conj(K) D K^*` of a complex symmetric matrix,
//! with `D` real nonnegative diagonal (descending) and `K` unitary.
//!
//! The four steps:
//!
//! 1. unitary-diagonalize `A^* A = Z1^* D^2 Z1`,
//! 2. orthogonally diagonalize `conj(Z1) A Z1^* = Z2 B Z2^t` (its real and
//!    imaginary parts are symmetric and commute),
//! 3. take per-entry phase factors `(Z3)_ii = (sqrt(b_i / |b_i|))^{-1}`,
//! 4. set `K = Z1^* Z2 Z3`.
//!
//! Step 2 diagonalizes the real part first and then, inside every
//! eigenvalue cluster, the restriction of the imaginary part; degenerate
//! spectra would otherwise leave the imaginary part undiagonalized.

use super::{
    hermitian_eig, sym_eig, ComplexMatrix, RealMatrix, CLUSTER_GAP_TOL, DEFAULT_SYM_TOL,
    SIMDIAG_TOL, ZERO_PHASE_TOL,
};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// `A = conj(K) D K^*` with `diag` descending and nonnegative.
#[derive(Debug, Clone)]
pub struct TakagiFactorization {
    pub diag: Vec<f64>,
    pub unitary: ComplexMatrix,
}

impl TakagiFactorization {
    /// Rebuild `conj(K) diag(d) K^*` from (possibly modified) diagonal
    /// entries.
    pub fn rebuild_with_diag(&self, diag: &[f64]) -> ComplexMatrix {
        let n = self.unitary.order();
        assert_eq!(diag.len(), n);
        let k_conj = self.unitary.conj();
        let mut scaled = k_conj.clone();
        for col in 0..n {
            for row in 0..n {
                let v = k_conj.get(row, col) * diag[col];
                scaled.set(row, col, v);
            }
        }
        scaled.matmul(&self.unitary.adjoint())
    }
}

pub fn takagi(a: &ComplexMatrix) -> Result<TakagiFactorization> {
    let n = a.order();
    let scale = a.max_abs();
    let max_asym = a.max_asymmetry();
    let tol = DEFAULT_SYM_TOL * scale.max(1.0);
    if max_asym > tol {
        return Err(Error::NotSymmetric { max_asym, tol });
    }
    if scale == 0.0 {
        return Ok(TakagiFactorization { diag: vec![0.0; n], unitary: ComplexMatrix::identity(n) });
    }

    // Work on the normalized matrix so the internal tolerances are
    // scale-free; the diagonal is rescaled at the end.
    let normalized = a.symmetrized().scale(Complex64::new(1.0 / scale, 0.0));

    // Step 1: A^* A = Z1^* D^2 Z1 with D descending. hermitian_eig returns
    // ascending order, so the columns are reversed.
    let gram = normalized.adjoint().matmul(&normalized);
    let (_, u_asc) = hermitian_eig(&gram)?;
    let mut u_desc = ComplexMatrix::zeros(n);
    for col in 0..n {
        for row in 0..n {
            u_desc.set(row, col, u_asc.get(row, n - 1 - col));
        }
    }
    // Z1 = U^*, so conj(Z1) = U^t and Z1^* = U.
    let c = u_desc.transpose().matmul(&normalized).matmul(&u_desc);

    // Step 2: simultaneous orthogonal diagonalization of Re(C) and Im(C).
    let re_eig = sym_eig(&c.re.symmetrized(), f64::INFINITY)?;
    let mut z2 = re_eig.eigenvectors.clone();
    let m_im = z2.transpose().matmul(&c.im).matmul(&z2).symmetrized();
    for cluster in clusters(&re_eig.eigenvalues, CLUSTER_GAP_TOL) {
        if cluster.len() < 2 {
            continue;
        }
        let k = cluster.len();
        let mut block = RealMatrix::zeros(k);
        for (bi, &i) in cluster.iter().enumerate() {
            for (bj, &j) in cluster.iter().enumerate() {
                block[(bi, bj)] = m_im[(i, j)];
            }
        }
        let rot = sym_eig(&block.symmetrized(), f64::INFINITY)?.eigenvectors;
        // Rotate the cluster's columns of Z2 in place.
        let mut updated = vec![vec![0.0; k]; n];
        for row in 0..n {
            for (bj, col_new) in updated[row].iter_mut().enumerate() {
                let mut s = 0.0;
                for (bi, &i) in cluster.iter().enumerate() {
                    s += z2[(row, i)] * rot[(bi, bj)];
                }
                *col_new = s;
            }
        }
        for row in 0..n {
            for (bj, &j) in cluster.iter().enumerate() {
                z2[(row, j)] = updated[row][bj];
            }
        }
    }

    let b_full = ComplexMatrix::real_matmul(&z2.transpose(), &c).matmul_real(&z2);
    let mut off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off = off.max(b_full.get(i, j).norm());
            }
        }
    }
    if off > SIMDIAG_TOL {
        return Err(Error::SimultaneousDiagonalization { residual: off, tol: SIMDIAG_TOL });
    }
    let b: Vec<Complex64> = (0..n).map(|i| b_full.get(i, i)).collect();

    // Align |b| descending with D from step 1 and permute Z2 to match.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b[j].norm().partial_cmp(&b[i].norm()).unwrap());
    let diag: Vec<f64> = order.iter().map(|&i| b[i].norm() * scale).collect();

    // Steps 3 and 4: K = Z1^* Z2 Z3 = U Z2 Z3; Z3 scales each column by
    // the inverse square-root phase of b_i (unit phase for b_i ~ 0).
    let uz2 = u_desc.matmul_real(&z2);
    let mut unitary = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        let phase = if b[src].norm() < ZERO_PHASE_TOL {
            Complex64::new(1.0, 0.0)
        } else {
            let theta = b[src].im.atan2(b[src].re);
            Complex64::from_polar(1.0, -0.5 * theta)
        };
        for row in 0..n {
            unitary.set(row, col, uz2.get(row, src) * phase);
        }
    }

    Ok(TakagiFactorization { diag, unitary })
}

/// The Takagi diagonal alone (the singular values of `a`, descending),
/// skipping the unitary factor. Distance evaluations only need these.
pub fn takagi_singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = a.order();
    let scale = a.max_abs();
    let max_asym = a.max_asymmetry();
    let tol = DEFAULT_SYM_TOL * scale.max(1.0);
    if max_asym > tol {
        return Err(Error::NotSymmetric { max_asym, tol });
    }
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let normalized = a.symmetrized().scale(Complex64::new(1.0 / scale, 0.0));
    let gram = normalized.adjoint().matmul(&normalized);
    let ascending = super::hermitian_eigenvalues(&gram)?;
    Ok(ascending.into_iter().rev().map(|mu| mu.max(0.0).sqrt() * scale).collect())
}

/// Consecutive index runs whose eigenvalue gaps stay below `gap_tol`.
fn clusters(sorted: &[f64], gap_tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..sorted.len() {
        match out.last_mut() {
            Some(run) if sorted[i] - sorted[*run.last().unwrap()] < gap_tol => run.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}
