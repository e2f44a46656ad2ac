//! Spread-out random points for test suites and benchmarks.
//!
//! [`crate::geometry::random_init`] clusters points tightly around the
//! basepoint, as training requires; the samplers here cover a wider chunk
//! of each space so that oracle checks exercise nontrivial geometry.

use crate::linalg::{ComplexMatrix, RealMatrix};
use num_complex::Complex64;
use rand::Rng;

/// Random complex symmetric matrix with entries uniform in `(-1, 1)`.
pub fn random_symmetric_complex(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

/// Random point of the Siegel upper-half space: a random symmetric real
/// part and a diagonally dominated positive-definite imaginary part.
pub fn random_siegel(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut re = RealMatrix::zeros(n);
    let mut im = RealMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let x = rng.gen_range(-1.0..1.0);
            re[(i, j)] = x;
            re[(j, i)] = x;
            let y = rng.gen_range(-0.5..0.5);
            im[(i, j)] = y;
            im[(j, i)] = y;
        }
        im[(i, i)] += 0.7 * n as f64 + rng.gen_range(0.0..1.0);
    }
    ComplexMatrix::from_parts(re, im)
}

/// Random point of the bounded domain, scaled so the largest singular
/// value stays clearly below one.
pub fn random_bounded(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    random_symmetric_complex(n, rng).scale(Complex64::new(0.4 / n as f64, 0.0))
}

/// Random bounded point bounded away from singularity (needed by the
/// bounded-domain crossratio, which inverts its arguments).
pub fn random_bounded_invertible(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let shift = ComplexMatrix::scaled_identity(n, Complex64::new(0.35, 0.0));
    &shift + &random_symmetric_complex(n, rng).scale(Complex64::new(0.12 / n as f64, 0.0))
}

/// Random point of the Poincare ball with norm at most `max_norm`.
pub fn random_ball(dim: usize, max_norm: f64, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1.0 {
            let scale = max_norm * rng.gen_range(0.0..1.0f64).powf(1.0 / dim as f64) / norm.max(1e-12);
            return v.into_iter().map(|x| x * scale).collect();
        }
    }
}

/// Random Euclidean vector with entries uniform in `(-range, range)`.
pub fn random_vector(dim: usize, range: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-range..range)).collect()
}
