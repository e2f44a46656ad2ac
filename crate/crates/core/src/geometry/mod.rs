//! Embedding spaces: Siegel upper-half space, bounded domain, Euclidean
//! space, the Poincare ball, and Cartesian products of these.
//!
//! Every space supports distance computation, conversion of Euclidean to
//! Riemannian gradients, projection to the epsilon-interior of the model
//! and initialization near the basepoint. Points are immutable values;
//! all operations are pure functions.

pub mod ball;
pub mod codec;
pub mod sampling;
pub mod siegel;
pub mod symplectic;

pub use siegel::{
    bounded_crossratio_matrix, bounded_distance_components, cayley_to_bounded, cayley_to_upper,
    components_to_distance, crossratio_eigen, crossratio_matrix, dist_bounded, dist_siegel,
    finsler_distances, siegel_distance_components,
};
pub use symplectic::{random_symplectic, symplectic_apply, SymplecticMatrix};

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, takagi, ComplexMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Default margin for projections back into the open models.
pub const DEFAULT_PROJECTION_EPSILON: f64 = 1e-4;
/// Half-width of the uniform initialization interval around the basepoint.
pub const INIT_PERTURBATION: f64 = 1e-3;

// ---------------------------------------------------------------------------
// SpaceDescriptor
// ---------------------------------------------------------------------------

/// Declarative description of an embedding space.
///
/// The string grammar is `kind:param` with `+` separating product factors:
/// `euclidean:20`, `poincare:10`, `siegel:4`, `bounded:3`,
/// `product:euclidean:10+poincare:10`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SpaceDescriptor {
    Euclidean { dim: usize },
    Poincare { dim: usize },
    SiegelUpper { n: usize },
    BoundedDomain { n: usize },
    Product { components: Vec<SpaceDescriptor> },
}

impl SpaceDescriptor {
    /// Number of free real parameters: `dim` for the flat and ball models,
    /// `n (n + 1)` for the matrix spaces, the sum for products. Used to
    /// compare models fairly.
    pub fn free_params(&self) -> usize {
        match self {
            Self::Euclidean { dim } | Self::Poincare { dim } => *dim,
            Self::SiegelUpper { n } | Self::BoundedDomain { n } => n * (n + 1),
            Self::Product { components } => components.iter().map(|c| c.free_params()).sum(),
        }
    }

    /// Flat encoding length in `f64` values (matrix spaces store real and
    /// imaginary parts).
    pub fn point_len(&self) -> usize {
        match self {
            Self::Euclidean { dim } | Self::Poincare { dim } => *dim,
            Self::SiegelUpper { n } | Self::BoundedDomain { n } => 2 * n * n,
            Self::Product { components } => components.iter().map(|c| c.point_len()).sum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Euclidean { dim } | Self::Poincare { dim } => {
                if *dim == 0 {
                    return Err(Error::InvalidArgument("dimension must be positive".into()));
                }
            }
            Self::SiegelUpper { n } | Self::BoundedDomain { n } => {
                if *n == 0 {
                    return Err(Error::InvalidArgument("matrix order must be positive".into()));
                }
            }
            Self::Product { components } => {
                if components.len() < 2 {
                    return Err(Error::InvalidArgument(
                        "a product space needs at least two components".into(),
                    ));
                }
                for c in components {
                    if matches!(c, Self::Product { .. }) {
                        return Err(Error::InvalidArgument(
                            "product spaces cannot be nested".into(),
                        ));
                    }
                    c.validate()?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Euclidean { dim } => write!(f, "euclidean:{dim}"),
            Self::Poincare { dim } => write!(f, "poincare:{dim}"),
            Self::SiegelUpper { n } => write!(f, "siegel:{n}"),
            Self::BoundedDomain { n } => write!(f, "bounded:{n}"),
            Self::Product { components } => {
                write!(f, "product:")?;
                for (i, c) in components.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for SpaceDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().strip_prefix("product:").unwrap_or(s.trim());
        let parse_single = |part: &str| -> Result<SpaceDescriptor> {
            let (kind, param) = part.split_once(':').ok_or_else(|| {
                Error::InvalidArgument(format!("space '{part}' must look like kind:param"))
            })?;
            let value: usize = param.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("invalid space parameter '{param}'"))
            })?;
            let space = match kind.trim() {
                "euclidean" | "e" => SpaceDescriptor::Euclidean { dim: value },
                "poincare" | "h" => SpaceDescriptor::Poincare { dim: value },
                "siegel" | "siegel_upper" | "s" => SpaceDescriptor::SiegelUpper { n: value },
                "bounded" | "bounded_domain" | "b" => SpaceDescriptor::BoundedDomain { n: value },
                other => {
                    return Err(Error::InvalidArgument(format!("unknown space kind '{other}'")))
                }
            };
            Ok(space)
        };
        let descriptor = if body.contains('+') {
            let components: Result<Vec<_>> = body.split('+').map(parse_single).collect();
            SpaceDescriptor::Product { components: components? }
        } else {
            parse_single(body)?
        };
        descriptor.validate()?;
        Ok(descriptor)
    }
}

impl TryFrom<String> for SpaceDescriptor {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SpaceDescriptor> for String {
    fn from(s: SpaceDescriptor) -> String {
        s.to_string()
    }
}

// ---------------------------------------------------------------------------
// Points and tangent vectors
// ---------------------------------------------------------------------------

/// Coordinates of a point or tangent vector on one space.
#[derive(Debug, Clone, PartialEq)]
pub enum PointData {
    Vector(Vec<f64>),
    Matrix(ComplexMatrix),
    Product(Vec<PointData>),
}

impl PointData {
    /// l2 / Frobenius norm; products take the l2 norm across components.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    fn norm_sq(&self) -> f64 {
        match self {
            Self::Vector(v) => v.iter().map(|x| x * x).sum(),
            Self::Matrix(m) => {
                let f = m.frobenius_norm();
                f * f
            }
            Self::Product(parts) => parts.iter().map(|p| p.norm_sq()).sum(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        match self {
            Self::Vector(v) => Self::Vector(v.iter().map(|x| x * s).collect()),
            Self::Matrix(m) => Self::Matrix(m.scale(Complex64::new(s, 0.0))),
            Self::Product(parts) => Self::Product(parts.iter().map(|p| p.scale(s)).collect()),
        }
    }

    /// `self + s * other`; shapes must match.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        match (self, other) {
            (Self::Vector(a), Self::Vector(b)) => {
                assert_eq!(a.len(), b.len(), "tangent shape mismatch");
                Self::Vector(a.iter().zip(b).map(|(x, y)| x + s * y).collect())
            }
            (Self::Matrix(a), Self::Matrix(b)) => {
                Self::Matrix(a + &b.scale(Complex64::new(s, 0.0)))
            }
            (Self::Product(a), Self::Product(b)) => {
                assert_eq!(a.len(), b.len(), "tangent shape mismatch");
                Self::Product(a.iter().zip(b).map(|(x, y)| x.add_scaled(y, s)).collect())
            }
            _ => panic!("mixed point data kinds"),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Self::Vector(v) => v.iter().all(|x| x.is_finite()),
            Self::Matrix(m) => {
                m.re.as_slice().iter().all(|x| x.is_finite())
                    && m.im.as_slice().iter().all(|x| x.is_finite())
            }
            Self::Product(parts) => parts.iter().all(|p| p.is_finite()),
        }
    }

    fn matches(&self, space: &SpaceDescriptor) -> bool {
        match (self, space) {
            (Self::Vector(v), SpaceDescriptor::Euclidean { dim })
            | (Self::Vector(v), SpaceDescriptor::Poincare { dim }) => v.len() == *dim,
            (Self::Matrix(m), SpaceDescriptor::SiegelUpper { n })
            | (Self::Matrix(m), SpaceDescriptor::BoundedDomain { n }) => m.order() == *n,
            (Self::Product(parts), SpaceDescriptor::Product { components }) => {
                parts.len() == components.len()
                    && parts.iter().zip(components).all(|(p, c)| p.matches(c))
            }
            _ => false,
        }
    }
}

/// A point on one embedding space.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldPoint {
    pub space: SpaceDescriptor,
    pub data: PointData,
}

/// A tangent vector; same coordinate layout as the point it is attached
/// to, with matrix-space entries symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(pub PointData);

impl TangentVector {
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
}

impl ManifoldPoint {
    pub fn new(space: SpaceDescriptor, data: PointData) -> Result<Self> {
        if !data.matches(&space) {
            return Err(Error::ShapeMismatch(format!("point data does not fit space {space}")));
        }
        Ok(Self { space, data })
    }

    /// The canonical basepoint: `i Id` on the upper-half space, the zero
    /// matrix or vector elsewhere.
    pub fn basepoint(space: &SpaceDescriptor) -> Self {
        let data = basepoint_data(space);
        Self { space: space.clone(), data }
    }

    /// Retraction step `p + v`.
    pub fn retract(&self, v: &TangentVector) -> Self {
        Self { space: self.space.clone(), data: self.data.add_scaled(&v.0, 1.0) }
    }

    /// Distance from the boundary of the model: the smallest eigenvalue of
    /// `Im Z` (Siegel), of `Id - W^* W` (bounded), `1 - ||x||` (ball), or
    /// infinity on flat space. Products take the minimum.
    pub fn invariant_margin(&self) -> Result<f64> {
        invariant_margin(&self.space, &self.data)
    }

    /// Fail unless the point satisfies its space invariant with at least
    /// `min_margin` to spare.
    pub fn check_invariant(&self, min_margin: f64) -> Result<()> {
        let margin = self.invariant_margin()?;
        if margin <= min_margin {
            return Err(Error::InvariantViolation {
                space: self.space.to_string(),
                detail: format!("margin {margin:.3e} <= required {min_margin:.3e}"),
            });
        }
        Ok(())
    }
}

fn basepoint_data(space: &SpaceDescriptor) -> PointData {
    match space {
        SpaceDescriptor::Euclidean { dim } | SpaceDescriptor::Poincare { dim } => {
            PointData::Vector(vec![0.0; *dim])
        }
        SpaceDescriptor::SiegelUpper { n } => {
            PointData::Matrix(ComplexMatrix::scaled_identity(*n, Complex64::new(0.0, 1.0)))
        }
        SpaceDescriptor::BoundedDomain { n } => PointData::Matrix(ComplexMatrix::zeros(*n)),
        SpaceDescriptor::Product { components } => {
            PointData::Product(components.iter().map(basepoint_data).collect())
        }
    }
}

fn invariant_margin(space: &SpaceDescriptor, data: &PointData) -> Result<f64> {
    match (space, data) {
        (SpaceDescriptor::Euclidean { .. }, PointData::Vector(_)) => Ok(f64::INFINITY),
        (SpaceDescriptor::Poincare { .. }, PointData::Vector(v)) => {
            Ok(1.0 - v.iter().map(|x| x * x).sum::<f64>().sqrt())
        }
        (SpaceDescriptor::SiegelUpper { .. }, PointData::Matrix(m)) => {
            let eig = sym_eig(&m.im.symmetrized(), f64::INFINITY)?;
            Ok(eig.eigenvalues[0])
        }
        (SpaceDescriptor::BoundedDomain { n }, PointData::Matrix(m)) => {
            let gram = m.adjoint().matmul(m);
            let residual = &ComplexMatrix::identity(*n) - &gram;
            let (vals, _) = crate::linalg::hermitian_eig(&hermitian_average(&residual))?;
            Ok(vals[0])
        }
        (SpaceDescriptor::Product { components }, PointData::Product(parts)) => {
            let mut min = f64::INFINITY;
            for (c, p) in components.iter().zip(parts) {
                min = min.min(invariant_margin(c, p)?);
            }
            Ok(min)
        }
        _ => Err(Error::ShapeMismatch("point data does not fit its space".into())),
    }
}

/// `(M + M^*) / 2`; used where a matrix is Hermitian up to round-off.
fn hermitian_average(m: &ComplexMatrix) -> ComplexMatrix {
    let adj = m.adjoint();
    (m + &adj).scale(Complex64::new(0.5, 0.0))
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

fn check_same_space(p: &ManifoldPoint, q: &ManifoldPoint) -> Result<()> {
    if p.space != q.space {
        return Err(Error::SpaceMismatch {
            expected: p.space.to_string(),
            got: q.space.to_string(),
        });
    }
    Ok(())
}

/// Distance between two points on the same space.
pub fn dist(p: &ManifoldPoint, q: &ManifoldPoint) -> Result<f64> {
    check_same_space(p, q)?;
    dist_data(&p.space, &p.data, &q.data)
}

fn dist_data(space: &SpaceDescriptor, p: &PointData, q: &PointData) -> Result<f64> {
    match (space, p, q) {
        (SpaceDescriptor::Euclidean { .. }, PointData::Vector(a), PointData::Vector(b)) => {
            Ok(ball::euclidean_dist(a, b))
        }
        (SpaceDescriptor::Poincare { .. }, PointData::Vector(a), PointData::Vector(b)) => {
            Ok(ball::poincare_dist(a, b))
        }
        (SpaceDescriptor::SiegelUpper { .. }, PointData::Matrix(a), PointData::Matrix(b)) => {
            dist_siegel(a, b)
        }
        (SpaceDescriptor::BoundedDomain { .. }, PointData::Matrix(a), PointData::Matrix(b)) => {
            dist_bounded(a, b)
        }
        (SpaceDescriptor::Product { components }, PointData::Product(a), PointData::Product(b)) => {
            let mut sum = 0.0;
            for ((c, x), y) in components.iter().zip(a).zip(b) {
                let d = dist_data(c, x, y)?;
                sum += d * d;
            }
            Ok(sum.sqrt())
        }
        _ => Err(Error::ShapeMismatch("point data does not fit its space".into())),
    }
}

/// Squared distance and its ambient Euclidean gradient with respect to the
/// second point (matrix gradients symmetrized). The gradient with respect
/// to the first point is obtained by swapping the arguments.
pub fn dist_sq_and_grad_second(
    p: &ManifoldPoint,
    q: &ManifoldPoint,
) -> Result<(f64, TangentVector)> {
    check_same_space(p, q)?;
    let (f, g) = dist_sq_grad_data(&p.space, &p.data, &q.data)?;
    Ok((f, TangentVector(g)))
}

/// Squared distance and the ambient Euclidean gradients with respect to
/// both points. For the matrix spaces both gradients come from a single
/// pipeline, which is what the optimizer uses.
pub fn dist_sq_and_grad_both(
    p: &ManifoldPoint,
    q: &ManifoldPoint,
) -> Result<(f64, TangentVector, TangentVector)> {
    check_same_space(p, q)?;
    let (f, gp, gq) = dist_sq_grad_both_data(&p.space, &p.data, &q.data)?;
    Ok((f, TangentVector(gp), TangentVector(gq)))
}

fn dist_sq_grad_both_data(
    space: &SpaceDescriptor,
    p: &PointData,
    q: &PointData,
) -> Result<(f64, PointData, PointData)> {
    match (space, p, q) {
        (SpaceDescriptor::Euclidean { .. }, PointData::Vector(a), PointData::Vector(b)) => {
            let (f, gq) = ball::euclidean_dist_sq_grad_second(a, b);
            let (_, gp) = ball::euclidean_dist_sq_grad_second(b, a);
            Ok((f, PointData::Vector(gp), PointData::Vector(gq)))
        }
        (SpaceDescriptor::Poincare { .. }, PointData::Vector(a), PointData::Vector(b)) => {
            let (f, gq) = ball::poincare_dist_sq_grad_second(a, b);
            let (_, gp) = ball::poincare_dist_sq_grad_second(b, a);
            Ok((f, PointData::Vector(gp), PointData::Vector(gq)))
        }
        (SpaceDescriptor::SiegelUpper { .. }, PointData::Matrix(a), PointData::Matrix(b)) => {
            let (f, gp, gq) = siegel::siegel_dist_sq_grad_both(a, b)?;
            Ok((f, PointData::Matrix(gp), PointData::Matrix(gq)))
        }
        (SpaceDescriptor::BoundedDomain { .. }, PointData::Matrix(a), PointData::Matrix(b)) => {
            let (f, gp, gq) = siegel::bounded_dist_sq_grad_both(a, b)?;
            Ok((f, PointData::Matrix(gp), PointData::Matrix(gq)))
        }
        (SpaceDescriptor::Product { components }, PointData::Product(a), PointData::Product(b)) => {
            let mut f = 0.0;
            let mut gps = Vec::with_capacity(components.len());
            let mut gqs = Vec::with_capacity(components.len());
            for ((c, x), y) in components.iter().zip(a).zip(b) {
                let (fc, gp, gq) = dist_sq_grad_both_data(c, x, y)?;
                f += fc;
                gps.push(gp);
                gqs.push(gq);
            }
            Ok((f, PointData::Product(gps), PointData::Product(gqs)))
        }
        _ => Err(Error::ShapeMismatch("point data does not fit its space".into())),
    }
}

fn dist_sq_grad_data(
    space: &SpaceDescriptor,
    p: &PointData,
    q: &PointData,
) -> Result<(f64, PointData)> {
    match (space, p, q) {
        (SpaceDescriptor::Euclidean { .. }, PointData::Vector(a), PointData::Vector(b)) => {
            let (f, g) = ball::euclidean_dist_sq_grad_second(a, b);
            Ok((f, PointData::Vector(g)))
        }
        (SpaceDescriptor::Poincare { .. }, PointData::Vector(a), PointData::Vector(b)) => {
            let (f, g) = ball::poincare_dist_sq_grad_second(a, b);
            Ok((f, PointData::Vector(g)))
        }
        (SpaceDescriptor::SiegelUpper { .. }, PointData::Matrix(a), PointData::Matrix(b)) => {
            let (f, g) = siegel::siegel_dist_sq_grad_second(a, b)?;
            Ok((f, PointData::Matrix(g)))
        }
        (SpaceDescriptor::BoundedDomain { .. }, PointData::Matrix(a), PointData::Matrix(b)) => {
            let (f, g) = siegel::bounded_dist_sq_grad_second(a, b)?;
            Ok((f, PointData::Matrix(g)))
        }
        (SpaceDescriptor::Product { components }, PointData::Product(a), PointData::Product(b)) => {
            let mut f = 0.0;
            let mut grads = Vec::with_capacity(components.len());
            for ((c, x), y) in components.iter().zip(a).zip(b) {
                let (fc, gc) = dist_sq_grad_data(c, x, y)?;
                f += fc;
                grads.push(gc);
            }
            Ok((f, PointData::Product(grads)))
        }
        _ => Err(Error::ShapeMismatch("point data does not fit its space".into())),
    }
}

// ---------------------------------------------------------------------------
// Riemannian gradient and metric
// ---------------------------------------------------------------------------

/// Convert an ambient Euclidean gradient into the Riemannian gradient:
/// `Y G Y` on the Siegel space, `(Id - Z conj(Z)) G (Id - conj(Z) Z)` on
/// the bounded domain, the conformal rescaling on the ball, identity on
/// flat space. Matrix gradients are symmetrized on the way in and out.
pub fn riemannian_grad(p: &ManifoldPoint, g: &TangentVector) -> Result<TangentVector> {
    Ok(TangentVector(riemannian_grad_data(&p.space, &p.data, &g.0)?))
}

fn riemannian_grad_data(
    space: &SpaceDescriptor,
    p: &PointData,
    g: &PointData,
) -> Result<PointData> {
    match (space, p, g) {
        (SpaceDescriptor::Euclidean { .. }, PointData::Vector(_), PointData::Vector(gv)) => {
            Ok(PointData::Vector(gv.clone()))
        }
        (SpaceDescriptor::Poincare { .. }, PointData::Vector(x), PointData::Vector(gv)) => {
            let factor = {
                let norm_sq: f64 = x.iter().map(|v| v * v).sum();
                let half = (1.0 - norm_sq) / 2.0;
                half * half
            };
            Ok(PointData::Vector(gv.iter().map(|v| v * factor).collect()))
        }
        (SpaceDescriptor::SiegelUpper { .. }, PointData::Matrix(z), PointData::Matrix(gm)) => {
            let y = z.im.symmetrized();
            let sym = gm.symmetrized();
            let out = ComplexMatrix::real_matmul(&y, &sym).matmul_real(&y);
            Ok(PointData::Matrix(out.symmetrized()))
        }
        (SpaceDescriptor::BoundedDomain { n }, PointData::Matrix(z), PointData::Matrix(gm)) => {
            let id = ComplexMatrix::identity(*n);
            let a = &id - &z.conj().matmul(z);
            let sym = gm.symmetrized();
            // conj(A) G A = (Id - Z conj(Z)) G (Id - conj(Z) Z) is symmetric
            // for symmetric G and Z.
            let out = a.conj().matmul(&sym).matmul(&a);
            Ok(PointData::Matrix(out.symmetrized()))
        }
        (
            SpaceDescriptor::Product { components },
            PointData::Product(ps),
            PointData::Product(gs),
        ) => {
            let mut out = Vec::with_capacity(components.len());
            for ((c, x), gv) in components.iter().zip(ps).zip(gs) {
                out.push(riemannian_grad_data(c, x, gv)?);
            }
            Ok(PointData::Product(out))
        }
        _ => Err(Error::ShapeMismatch("gradient does not fit the point".into())),
    }
}

/// Riemannian inner product of two tangent vectors at `p`.
pub fn metric_pairing(p: &ManifoldPoint, u: &TangentVector, v: &TangentVector) -> Result<f64> {
    metric_pairing_data(&p.space, &p.data, &u.0, &v.0)
}

fn metric_pairing_data(
    space: &SpaceDescriptor,
    p: &PointData,
    u: &PointData,
    v: &PointData,
) -> Result<f64> {
    match (space, p, u, v) {
        (
            SpaceDescriptor::Euclidean { .. },
            PointData::Vector(_),
            PointData::Vector(a),
            PointData::Vector(b),
        ) => Ok(a.iter().zip(b).map(|(x, y)| x * y).sum()),
        (
            SpaceDescriptor::Poincare { .. },
            PointData::Vector(x),
            PointData::Vector(a),
            PointData::Vector(b),
        ) => {
            let norm_sq: f64 = x.iter().map(|t| t * t).sum();
            let lambda = 2.0 / (1.0 - norm_sq);
            Ok(lambda * lambda * a.iter().zip(b).map(|(s, t)| s * t).sum::<f64>())
        }
        (
            SpaceDescriptor::SiegelUpper { .. },
            PointData::Matrix(z),
            PointData::Matrix(a),
            PointData::Matrix(b),
        ) => {
            // Re tr(Y^{-1} U Y^{-1} conj(V))
            let y_inv = z.im.symmetrized().lu_inverse()?;
            let prod = ComplexMatrix::real_matmul(&y_inv, a)
                .matmul(&ComplexMatrix::real_matmul(&y_inv, &b.conj()));
            Ok(trace_re(&prod))
        }
        (
            SpaceDescriptor::BoundedDomain { n },
            PointData::Matrix(z),
            PointData::Matrix(a),
            PointData::Matrix(b),
        ) => {
            // Re tr((Id - Z conj(Z))^{-1} U (Id - conj(Z) Z)^{-1} conj(V))
            let id = ComplexMatrix::identity(*n);
            let inner = &id - &z.conj().matmul(z);
            let inner_inv = crate::linalg::complex_inverse(&inner)?;
            let outer_inv = inner_inv.conj();
            let prod = outer_inv.matmul(a).matmul(&inner_inv).matmul(&b.conj());
            Ok(trace_re(&prod))
        }
        (
            SpaceDescriptor::Product { components },
            PointData::Product(ps),
            PointData::Product(us),
            PointData::Product(vs),
        ) => {
            let mut sum = 0.0;
            for (((c, x), a), b) in components.iter().zip(ps).zip(us).zip(vs) {
                sum += metric_pairing_data(c, x, a, b)?;
            }
            Ok(sum)
        }
        _ => Err(Error::ShapeMismatch("tangent vectors do not fit the point".into())),
    }
}

fn trace_re(m: &ComplexMatrix) -> f64 {
    (0..m.order()).map(|i| m.re[(i, i)]).sum()
}

// ---------------------------------------------------------------------------
// Projection
// ---------------------------------------------------------------------------

/// Project a point into the epsilon-interior of its model. Points already
/// in the interior are returned unchanged (bit-identical).
pub fn project_to_space(p: &ManifoldPoint, epsilon: f64) -> Result<ManifoldPoint> {
    Ok(project_with_flag(p, epsilon)?.0)
}

/// Like [`project_to_space`], additionally reporting whether the point had
/// to be moved.
pub fn project_with_flag(p: &ManifoldPoint, epsilon: f64) -> Result<(ManifoldPoint, bool)> {
    let (data, changed) = project_data(&p.space, &p.data, epsilon)?;
    Ok((ManifoldPoint { space: p.space.clone(), data }, changed))
}

fn project_data(space: &SpaceDescriptor, p: &PointData, eps: f64) -> Result<(PointData, bool)> {
    match (space, p) {
        (SpaceDescriptor::Euclidean { .. }, PointData::Vector(v)) => {
            Ok((PointData::Vector(v.clone()), false))
        }
        (SpaceDescriptor::Poincare { .. }, PointData::Vector(v)) => {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= (1.0 - eps) * (1.0 + 1e-14) {
                Ok((PointData::Vector(v.clone()), false))
            } else {
                let s = (1.0 - eps) / norm;
                Ok((PointData::Vector(v.iter().map(|x| x * s).collect()), true))
            }
        }
        (SpaceDescriptor::SiegelUpper { .. }, PointData::Matrix(z)) => {
            let eig = sym_eig(&z.im.symmetrized(), f64::INFINITY)?;
            // Round-off slack keeps re-projection of a freshly clamped
            // point a no-op.
            let slack = 1e-12 * (1.0 + z.im.frobenius_norm());
            if eig.eigenvalues[0] >= eps - slack {
                return Ok((PointData::Matrix(z.clone()), false));
            }
            let clamped = eig.rebuild_with(|lam| if lam > eps { lam } else { eps });
            let out = ComplexMatrix::from_parts(z.re.clone(), clamped.symmetrized());
            Ok((PointData::Matrix(out), true))
        }
        (SpaceDescriptor::BoundedDomain { .. }, PointData::Matrix(z)) => {
            let factorization = takagi(&z.symmetrized())?;
            let limit = 1.0 - eps;
            let slack = 1e-12 * (1.0 + z.frobenius_norm());
            if factorization.diag.iter().all(|&d| d <= limit + slack) {
                return Ok((PointData::Matrix(z.clone()), false));
            }
            let clamped: Vec<f64> =
                factorization.diag.iter().map(|&d| if d < limit { d } else { limit }).collect();
            let out = factorization.rebuild_with_diag(&clamped).symmetrized();
            Ok((PointData::Matrix(out), true))
        }
        (SpaceDescriptor::Product { components }, PointData::Product(parts)) => {
            let mut out = Vec::with_capacity(parts.len());
            let mut changed = false;
            for (c, part) in components.iter().zip(parts) {
                let (q, ch) = project_data(c, part, eps)?;
                out.push(q);
                changed |= ch;
            }
            Ok((PointData::Product(out), changed))
        }
        _ => Err(Error::ShapeMismatch("point data does not fit its space".into())),
    }
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

/// Deterministic random point close to the basepoint: uniform entries in
/// `(-0.001, 0.001)` added to `i Id` (Siegel), the zero matrix (bounded) or
/// the zero vector (flat/ball).
pub fn random_init(space: &SpaceDescriptor, seed: u64) -> ManifoldPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_point(space, &mut rng)
}

/// Random point near the basepoint drawn from a caller-provided generator.
pub fn random_point(space: &SpaceDescriptor, rng: &mut impl Rng) -> ManifoldPoint {
    let data = random_point_data(space, rng);
    ManifoldPoint { space: space.clone(), data }
}

fn random_point_data(space: &SpaceDescriptor, rng: &mut impl Rng) -> PointData {
    let b = INIT_PERTURBATION;
    match space {
        SpaceDescriptor::Euclidean { dim } | SpaceDescriptor::Poincare { dim } => {
            PointData::Vector((0..*dim).map(|_| rng.gen_range(-b..b)).collect())
        }
        SpaceDescriptor::SiegelUpper { n } | SpaceDescriptor::BoundedDomain { n } => {
            let mut m = if matches!(space, SpaceDescriptor::SiegelUpper { .. }) {
                ComplexMatrix::scaled_identity(*n, Complex64::new(0.0, 1.0))
            } else {
                ComplexMatrix::zeros(*n)
            };
            for i in 0..*n {
                for j in i..*n {
                    let v =
                        m.get(i, j) + Complex64::new(rng.gen_range(-b..b), rng.gen_range(-b..b));
                    m.set(i, j, v);
                    m.set(j, i, v);
                }
            }
            PointData::Matrix(m)
        }
        SpaceDescriptor::Product { components } => {
            PointData::Product(components.iter().map(|c| random_point_data(c, rng)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RealMatrix;

    fn space(s: &str) -> SpaceDescriptor {
        s.parse().unwrap()
    }

    fn vector_point(s: &str, v: &[f64]) -> ManifoldPoint {
        ManifoldPoint::new(space(s), PointData::Vector(v.to_vec())).unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "euclidean:20",
            "poincare:10",
            "siegel:4",
            "bounded:3",
            "product:euclidean:10+poincare:10",
        ] {
            let d = space(s);
            assert_eq!(d.to_string(), s);
        }
        // Aliases and the bare product form.
        assert_eq!(space("siegel_upper:2"), SpaceDescriptor::SiegelUpper { n: 2 });
        assert_eq!(
            space("poincare:3+poincare:3"),
            SpaceDescriptor::Product {
                components: vec![
                    SpaceDescriptor::Poincare { dim: 3 },
                    SpaceDescriptor::Poincare { dim: 3 },
                ]
            }
        );
        assert!("nope:3".parse::<SpaceDescriptor>().is_err());
        assert!("euclidean:0".parse::<SpaceDescriptor>().is_err());
    }

    #[test]
    fn free_parameter_counts() {
        assert_eq!(space("euclidean:20").free_params(), 20);
        assert_eq!(space("poincare:20").free_params(), 20);
        assert_eq!(space("siegel:4").free_params(), 20);
        assert_eq!(space("bounded:4").free_params(), 20);
        assert_eq!(space("product:euclidean:10+poincare:10").free_params(), 20);
    }

    #[test]
    fn euclidean_distance_dispatch() {
        let p = vector_point("euclidean:2", &[0.0, 0.0]);
        let q = vector_point("euclidean:2", &[3.0, 4.0]);
        assert_eq!(dist(&p, &q).unwrap(), 5.0);
    }

    #[test]
    fn poincare_distance_dispatch() {
        let p = vector_point("poincare:2", &[0.0, 0.0]);
        let q = vector_point("poincare:2", &[0.5, 0.0]);
        assert!((dist(&p, &q).unwrap() - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn product_distance_is_l2_of_components() {
        let s = space("product:euclidean:1+euclidean:1");
        let p = ManifoldPoint::new(
            s.clone(),
            PointData::Product(vec![PointData::Vector(vec![0.0]), PointData::Vector(vec![0.0])]),
        )
        .unwrap();
        let q = ManifoldPoint::new(
            s,
            PointData::Product(vec![PointData::Vector(vec![3.0]), PointData::Vector(vec![4.0])]),
        )
        .unwrap();
        assert!((dist(&p, &q).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let p = vector_point("euclidean:2", &[0.0, 0.0]);
        let q = vector_point("poincare:2", &[0.0, 0.0]);
        assert!(matches!(dist(&p, &q), Err(Error::SpaceMismatch { .. })));
    }

    #[test]
    fn riemannian_grad_is_identity_at_the_siegel_basepoint() {
        // Y = Id there, so the sandwich is trivial.
        let p = ManifoldPoint::basepoint(&space("siegel:3"));
        let g = TangentVector(PointData::Matrix({
            let mut m = ComplexMatrix::zeros(3);
            m.set(0, 1, Complex64::new(0.3, -0.2));
            m.set(1, 0, Complex64::new(0.3, -0.2));
            m.set(2, 2, Complex64::new(-0.5, 0.1));
            m
        }));
        let r = riemannian_grad(&p, &g).unwrap();
        match (&r.0, &g.0) {
            (PointData::Matrix(a), PointData::Matrix(b)) => {
                assert!((a - b).frobenius_norm() < 1e-14);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn riemannian_grad_is_identity_at_the_bounded_origin() {
        let p = ManifoldPoint::basepoint(&space("bounded:2"));
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 0, Complex64::new(0.4, 0.7));
        m.set(1, 1, Complex64::new(-0.1, 0.2));
        let g = TangentVector(PointData::Matrix(m.clone()));
        let r = riemannian_grad(&p, &g).unwrap();
        match &r.0 {
            PointData::Matrix(a) => assert!((a - &m).frobenius_norm() < 1e-14),
            _ => unreachable!(),
        }
    }

    #[test]
    fn projection_leaves_interior_siegel_points_bit_identical() {
        let z = ComplexMatrix::from_parts(
            RealMatrix::from_rows(&[&[0.3, 0.1], &[0.1, -0.2]]),
            RealMatrix::diagonal(&[2.0, 1.0]),
        );
        let p = ManifoldPoint::new(space("siegel:2"), PointData::Matrix(z.clone())).unwrap();
        let (projected, changed) = project_with_flag(&p, 1e-3).unwrap();
        assert!(!changed);
        assert_eq!(projected.data, PointData::Matrix(z));
    }

    #[test]
    fn projection_clamps_siegel_eigenvalues() {
        let z = ComplexMatrix::from_parts(RealMatrix::zeros(2), RealMatrix::diagonal(&[2.0, -0.5]));
        let p = ManifoldPoint::new(space("siegel:2"), PointData::Matrix(z)).unwrap();
        let (projected, changed) = project_with_flag(&p, 1e-3).unwrap();
        assert!(changed);
        match &projected.data {
            PointData::Matrix(m) => {
                let eig = sym_eig(&m.im, 1e-12).unwrap().eigenvalues;
                assert!((eig[0] - 1e-3).abs() < 1e-12);
                assert!((eig[1] - 2.0).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
        // Idempotent on the clamped point.
        let (again, changed_again) = project_with_flag(&projected, 1e-3).unwrap();
        assert!(!changed_again);
        assert_eq!(again.data, projected.data);
    }

    #[test]
    fn projection_clamps_bounded_singular_values() {
        let mut z = ComplexMatrix::zeros(1);
        z.set(0, 0, Complex64::new(0.9999, 0.0));
        let p = ManifoldPoint::new(space("bounded:1"), PointData::Matrix(z)).unwrap();
        let (projected, changed) = project_with_flag(&p, 1e-3).unwrap();
        assert!(changed);
        match &projected.data {
            PointData::Matrix(m) => {
                assert!((m.get(0, 0).norm() - 0.999).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn random_init_siegel_stays_near_the_basepoint() {
        // Gershgorin: eigenvalues of Id + S lie within 0.003 of 1 for n=3.
        let p = random_init(&space("siegel:3"), 42);
        match &p.data {
            PointData::Matrix(m) => {
                let eig = sym_eig(&m.im, 1e-12).unwrap().eigenvalues;
                for lam in eig {
                    assert!(lam > 0.997 && lam < 1.003, "eigenvalue {lam}");
                }
            }
            _ => unreachable!(),
        }
        p.check_invariant(0.9).unwrap();
    }

    #[test]
    fn random_init_is_deterministic() {
        let s = space("product:siegel:2+poincare:4");
        assert_eq!(random_init(&s, 7), random_init(&s, 7));
        assert_ne!(random_init(&s, 7), random_init(&s, 8));
    }

    #[test]
    fn random_init_bounded_is_tiny_and_valid() {
        let p = random_init(&space("bounded:2"), 3);
        match &p.data {
            PointData::Matrix(m) => assert!(m.max_abs() < 1e-3),
            _ => unreachable!(),
        }
        p.check_invariant(0.9).unwrap();
    }

    #[test]
    fn invariant_margin_measures_boundary_distance() {
        let p = vector_point("poincare:2", &[0.6, 0.0]);
        assert!((p.invariant_margin().unwrap() - 0.4).abs() < 1e-12);
        let q = ManifoldPoint::basepoint(&space("siegel:2"));
        assert!((q.invariant_margin().unwrap() - 1.0).abs() < 1e-12);
    }
}
