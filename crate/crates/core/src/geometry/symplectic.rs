//! The symplectic group `Sp(2n, R)` acting on the Siegel upper-half space
//! by fractional linear transformations `g . Z = (AZ + B)(CZ + D)^{-1}`.
//!
//! Used as a test bed: the action is by isometries, so distances must be
//! preserved under random group elements.

use crate::error::{Error, Result};
use crate::linalg::{complex_inverse, ComplexMatrix, RealMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// Block form `[[A, B], [C, D]]` of a real symplectic matrix, satisfying
/// `A^t D - C^t B = Id`, `A^t C = C^t A`, `B^t D = D^t B`.
#[derive(Debug, Clone)]
pub struct SymplecticMatrix {
    pub a: RealMatrix,
    pub b: RealMatrix,
    pub c: RealMatrix,
    pub d: RealMatrix,
}

impl SymplecticMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            a: RealMatrix::identity(n),
            b: RealMatrix::zeros(n),
            c: RealMatrix::zeros(n),
            d: RealMatrix::identity(n),
        }
    }

    /// The standard symplectic form `J = [[0, Id], [-Id, 0]]`.
    pub fn j(n: usize) -> Self {
        Self {
            a: RealMatrix::zeros(n),
            b: RealMatrix::identity(n),
            c: RealMatrix::identity(n).scale(-1.0),
            d: RealMatrix::zeros(n),
        }
    }

    /// Translation `Z -> Z + B` for symmetric `B`.
    pub fn translation(b: RealMatrix) -> Self {
        let n = b.order();
        Self { a: RealMatrix::identity(n), b, c: RealMatrix::zeros(n), d: RealMatrix::identity(n) }
    }

    /// Dilation `[[M, 0], [0, M^{-t}]]` for invertible `M`.
    pub fn dilation(m: RealMatrix) -> Result<Self> {
        let n = m.order();
        let m_inv_t = m.lu_inverse()?.transpose();
        Ok(Self { a: m, b: RealMatrix::zeros(n), c: RealMatrix::zeros(n), d: m_inv_t })
    }

    /// Block product of two symplectic matrices.
    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            a: &self.a.matmul(&rhs.a) + &self.b.matmul(&rhs.c),
            b: &self.a.matmul(&rhs.b) + &self.b.matmul(&rhs.d),
            c: &self.c.matmul(&rhs.a) + &self.d.matmul(&rhs.c),
            d: &self.c.matmul(&rhs.b) + &self.d.matmul(&rhs.d),
        }
    }

    /// Largest violation of the three block conditions.
    pub fn block_residual(&self) -> f64 {
        let n = self.a.order();
        let id = RealMatrix::identity(n);
        let r1 = &(&self.a.transpose().matmul(&self.d) - &self.c.transpose().matmul(&self.b)) - &id;
        let r2 = &self.a.transpose().matmul(&self.c) - &self.c.transpose().matmul(&self.a);
        let r3 = &self.b.transpose().matmul(&self.d) - &self.d.transpose().matmul(&self.b);
        r1.max_abs().max(r2.max_abs()).max(r3.max_abs())
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let residual = self.block_residual();
        if residual > tol {
            return Err(Error::InvalidArgument(format!(
                "symplectic block conditions violated by {residual:.3e}"
            )));
        }
        Ok(())
    }
}

/// Fractional linear action `g . Z = (AZ + B)(CZ + D)^{-1}` on the
/// upper-half space.
pub fn symplectic_apply(g: &SymplecticMatrix, z: &ComplexMatrix) -> Result<ComplexMatrix> {
    let num = &ComplexMatrix::real_matmul(&g.a, z) + &ComplexMatrix::from_real(g.b.clone());
    let den = &ComplexMatrix::real_matmul(&g.c, z) + &ComplexMatrix::from_real(g.d.clone());
    let den_inv = complex_inverse(&den)?;
    Ok(num.matmul(&den_inv).symmetrized())
}

/// Deterministic random symplectic matrix: a product of three generators
/// (translations by symmetric matrices, dilations by well-conditioned
/// matrices, and the symplectic form J) drawn from the seed.
pub fn random_symplectic(n: usize, seed: u64) -> SymplecticMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = SymplecticMatrix::identity(n);
    for _ in 0..3 {
        let pick: u8 = rng.gen_range(0..3);
        let factor = match pick {
            0 => {
                let mut b = RealMatrix::zeros(n);
                for i in 0..n {
                    for j in i..n {
                        let v = rng.gen_range(-1.0..1.0);
                        b[(i, j)] = v;
                        b[(j, i)] = v;
                    }
                }
                SymplecticMatrix::translation(b)
            }
            1 => {
                // Id plus a small perturbation stays invertible.
                let mut m = RealMatrix::identity(n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] += rng.gen_range(-0.4..0.4) / n as f64;
                    }
                }
                SymplecticMatrix::dilation(m).expect("perturbed identity is invertible")
            }
            _ => SymplecticMatrix::j(n),
        };
        g = g.compose(&factor);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sampling;
    use crate::geometry::siegel::dist_siegel;
    use num_complex::Complex64;
    use rand::rngs::StdRng;

    #[test]
    fn identity_action_is_trivial() {
        let mut rng = StdRng::seed_from_u64(1);
        let z = sampling::random_siegel(3, &mut rng);
        let g = SymplecticMatrix::identity(3);
        let moved = symplectic_apply(&g, &z).unwrap();
        assert!((&moved - &z).frobenius_norm() < 1e-12);
    }

    #[test]
    fn j_fixes_the_basepoint() {
        // J . (i Id) = (Id)(-i Id)^{-1} = i Id.
        let i_id = ComplexMatrix::scaled_identity(2, Complex64::new(0.0, 1.0));
        let g = SymplecticMatrix::j(2);
        let moved = symplectic_apply(&g, &i_id).unwrap();
        assert!((&moved - &i_id).frobenius_norm() < 1e-13);
    }

    #[test]
    fn translation_shifts_real_part() {
        let mut rng = StdRng::seed_from_u64(2);
        let z = sampling::random_siegel(3, &mut rng);
        let mut b = RealMatrix::zeros(3);
        b[(0, 1)] = 0.7;
        b[(1, 0)] = 0.7;
        b[(2, 2)] = -1.3;
        let g = SymplecticMatrix::translation(b.clone());
        let moved = symplectic_apply(&g, &z).unwrap();
        let expected = &z + &ComplexMatrix::from_real(b);
        assert!((&moved - &expected).frobenius_norm() < 1e-12);
    }

    #[test]
    fn random_elements_satisfy_block_conditions() {
        for seed in 0..20 {
            let g = random_symplectic(3, seed);
            assert!(
                g.block_residual() <= 1e-9,
                "seed {seed}: residual {}",
                g.block_residual()
            );
        }
    }

    #[test]
    fn random_is_deterministic_in_the_seed() {
        let g1 = random_symplectic(4, 99);
        let g2 = random_symplectic(4, 99);
        assert!((&g1.a - &g2.a).max_abs() == 0.0);
        assert!((&g1.b - &g2.b).max_abs() == 0.0);
        assert!((&g1.c - &g2.c).max_abs() == 0.0);
        assert!((&g1.d - &g2.d).max_abs() == 0.0);
    }

    #[test]
    fn action_is_isometric() {
        let mut rng = StdRng::seed_from_u64(5);
        for seed in 0..20 {
            let g = random_symplectic(2, seed);
            let z1 = sampling::random_siegel(2, &mut rng);
            let z2 = sampling::random_siegel(2, &mut rng);
            let before = dist_siegel(&z1, &z2).unwrap();
            let after =
                dist_siegel(&symplectic_apply(&g, &z1).unwrap(), &symplectic_apply(&g, &z2).unwrap())
                    .unwrap();
            assert!(
                (before - after).abs() <= 1e-7,
                "seed {seed}: isometry defect {}",
                (before - after).abs()
            );
        }
    }
}
