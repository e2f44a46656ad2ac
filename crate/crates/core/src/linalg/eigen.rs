//! Symmetric and Hermitian eigendecomposition.
//!
//! Real symmetric matrices are diagonalized with cyclic Jacobi rotations;
//! the Hermitian case goes through the real `2n x 2n` embedding
//! `[[X, -Y], [Y, X]]`, whose spectrum doubles the Hermitian spectrum.

use super::{ComplexMatrix, RealMatrix, JACOBI_MAX_SWEEPS};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Eigendecomposition `A = Q diag(eigenvalues) Q^t` of a real symmetric
/// matrix. Eigenvalues ascending, eigenvector columns orthonormal.
#[derive(Debug, Clone)]
pub struct SymEigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: RealMatrix,
}

impl SymEigDecomposition {
    /// Rebuild `Q diag(f(lambda)) Q^t` for an entrywise spectral map.
    pub fn rebuild_with(&self, f: impl Fn(f64) -> f64) -> RealMatrix {
        let n = self.eigenvalues.len();
        let q = &self.eigenvectors;
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for (k, &lam) in self.eigenvalues.iter().enumerate() {
                    s += q[(i, k)] * f(lam) * q[(j, k)];
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}

/// Cyclic Jacobi on flat row-major symmetric storage.
///
/// `vectors`, when present, accumulates the transposed eigenvector matrix
/// (row k = eigenvector of the k-th diagonal entry) and must come in as
/// the identity. Rows of `m` are updated contiguously; the mirrored
/// column writes keep the full symmetric storage in sync.
fn jacobi_flat(m: &mut [f64], n: usize, mut vectors: Option<&mut [f64]>) -> Result<()> {
    if n < 2 {
        return Ok(());
    }
    let scale = m.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let stop = 1e-14 * scale;
    // Rotations below this cannot lift the off-diagonal norm above `stop`.
    let skip = stop / (n * n) as f64;

    let mut row_p = vec![0.0; n];
    let mut row_q = vec![0.0; n];
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * m[i * n + j] * m[i * n + j];
            }
        }
        if off.sqrt() <= stop {
            return Ok(());
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= skip {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                row_p.copy_from_slice(&m[p * n..p * n + n]);
                row_q.copy_from_slice(&m[q * n..q * n + n]);
                for k in 0..n {
                    let akp = row_p[k];
                    let akq = row_q[k];
                    row_p[k] = akp - s * (akq + tau * akp);
                    row_q[k] = akq + s * (akp - tau * akq);
                }
                row_p[p] = app - t * apq;
                row_q[q] = aqq + t * apq;
                row_p[q] = 0.0;
                row_q[p] = 0.0;
                m[p * n..p * n + n].copy_from_slice(&row_p);
                m[q * n..q * n + n].copy_from_slice(&row_q);
                for k in 0..n {
                    m[k * n + p] = row_p[k];
                    m[k * n + q] = row_q[k];
                }

                if let Some(v) = vectors.as_deref_mut() {
                    let (head, tail) = v.split_at_mut(q * n);
                    let vp = &mut head[p * n..p * n + n];
                    let vq = &mut tail[..n];
                    for (a, b) in vp.iter_mut().zip(vq.iter_mut()) {
                        let va = *a;
                        let vb = *b;
                        *a = va - s * (vb + tau * va);
                        *b = vb + s * (va - tau * vb);
                    }
                }
            }
        }
    }
    let mut off = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            off += 2.0 * m[i * n + j] * m[i * n + j];
        }
    }
    if off.sqrt() <= stop {
        Ok(())
    } else {
        Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS, off_norm: off.sqrt() })
    }
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix.
///
/// `tol` bounds the accepted entrywise asymmetry of the input.
pub fn sym_eig(a: &RealMatrix, tol: f64) -> Result<SymEigDecomposition> {
    let max_asym = a.max_asymmetry();
    if max_asym > tol {
        return Err(Error::NotSymmetric { max_asym, tol });
    }
    let n = a.order();
    let mut m = a.symmetrized();
    // Transposed accumulation: row k is the k-th eigenvector.
    let mut vt = RealMatrix::identity(n);
    jacobi_flat(m.data_mut(), n, Some(vt.data_mut()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut eigenvectors = RealMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[(row, dst)] = vt[(src, row)];
        }
    }
    Ok(SymEigDecomposition { eigenvalues, eigenvectors })
}

/// Eigenvalues only, ascending; skips the eigenvector accumulation.
pub fn sym_eigenvalues(a: &RealMatrix, tol: f64) -> Result<Vec<f64>> {
    let max_asym = a.max_asymmetry();
    if max_asym > tol {
        return Err(Error::NotSymmetric { max_asym, tol });
    }
    let n = a.order();
    let mut m = a.symmetrized();
    jacobi_flat(m.data_mut(), n, None)?;
    let mut values: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    values.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(values)
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    let scale = a.max_abs().max(1.0);
    let max_dev = a.max_hermitian_deviation();
    let tol = super::DEFAULT_SYM_TOL * scale;
    if max_dev > tol {
        return Err(Error::NotHermitian { max_dev, tol });
    }
    Ok(())
}

/// Eigendecomposition `A = U diag(lambda) U^*` of a Hermitian matrix.
///
/// Returns real eigenvalues in ascending order and a unitary matrix whose
/// columns are the eigenvectors. The real embedding carries every
/// eigenvalue twice; the duplicated directions (`u` and `iu`) are merged
/// back into `n` complex eigenvectors by complex Gram-Schmidt.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(a)?;
    let n = a.order();
    let embedded = a.real_embedding().symmetrized();
    let eig = sym_eig(&embedded, f64::INFINITY)?;

    // Candidate complex eigenvectors in ascending eigenvalue order.
    let mut candidates: Vec<(f64, Vec<Complex64>)> = (0..2 * n)
        .map(|col| {
            let vec: Vec<Complex64> = (0..n)
                .map(|row| {
                    Complex64::new(eig.eigenvectors[(row, col)], eig.eigenvectors[(row + n, col)])
                })
                .collect();
            (eig.eigenvalues[col], vec)
        })
        .collect();

    let mut accepted: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(n);
    for threshold in [0.7, 1e-3, 0.0] {
        let mut remaining = Vec::new();
        for (lam, mut vec) in candidates {
            if accepted.len() == n {
                break;
            }
            let norm = orthogonalize(&mut vec, &accepted);
            if norm > threshold && norm > 1e-12 {
                for x in vec.iter_mut() {
                    *x /= norm;
                }
                accepted.push((lam, vec));
            } else {
                remaining.push((lam, vec));
            }
        }
        if accepted.len() == n {
            break;
        }
        candidates = remaining;
    }
    if accepted.len() != n {
        return Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS, off_norm: f64::NAN });
    }

    accepted.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let eigenvalues: Vec<f64> = accepted.iter().map(|(lam, _)| *lam).collect();
    let mut unitary = ComplexMatrix::zeros(n);
    for (col, (_, vec)) in accepted.iter().enumerate() {
        for (row, &x) in vec.iter().enumerate() {
            unitary.set(row, col, x);
        }
    }
    Ok((eigenvalues, unitary))
}

/// Hermitian eigenvalues only, ascending. The doubled spectrum of the real
/// embedding is collapsed pairwise.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let embedded = a.real_embedding().symmetrized();
    let doubled = sym_eigenvalues(&embedded, f64::INFINITY)?;
    Ok(doubled.into_iter().step_by(2).collect())
}

/// Project `vec` off the span of `basis` (twice, for re-orthogonalization)
/// and return its remaining norm.
fn orthogonalize(vec: &mut [Complex64], basis: &[(f64, Vec<Complex64>)]) -> f64 {
    for _ in 0..2 {
        for (_, b) in basis {
            let inner: Complex64 = b.iter().zip(vec.iter()).map(|(x, y)| x.conj() * y).sum();
            for (v, x) in vec.iter_mut().zip(b.iter()) {
                *v -= inner * x;
            }
        }
    }
    vec.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Square root and inverse square root of a symmetric positive-definite
/// matrix, both symmetric positive definite.
pub fn pd_sqrt_inv(y: &RealMatrix, sym_tol: f64) -> Result<(RealMatrix, RealMatrix)> {
    let eig = sym_eig(y, sym_tol)?;
    let min_eig = eig.eigenvalues[0];
    if min_eig <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    let sqrt = eig.rebuild_with(f64::sqrt);
    let sqrt_inv = eig.rebuild_with(|lam| 1.0 / lam.sqrt());
    Ok((sqrt, sqrt_inv))
}
