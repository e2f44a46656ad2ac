//! Graph embeddings in matrix models of Hermitian symmetric spaces.
//!
//! The crate learns vertex representations of graphs in the Siegel
//! upper-half space and its bounded domain model (spaces of complex
//! symmetric matrices), next to constant-curvature baselines (Euclidean
//! space, the Poincare ball) and Cartesian products of those. Training
//! minimizes a distortion loss with stochastic Riemannian gradient
//! descent; evaluation reports average distortion and mean average
//! precision.
//!
//! Module map:
//!
//! - [`linalg`]: dense complex/real matrix kernel (arithmetic, inversion,
//!   symmetric and Hermitian eigendecomposition, Takagi factorization).
//! - [`geometry`]: the embedding spaces with distances, gradients,
//!   projections and initialization.
//! - [`graphs`]: benchmark graph generators, dataset ingestion and
//!   all-pairs shortest paths.
//! - [`training`]: RSGD with retraction, burn-in, schedules and early
//!   stopping.
//! - [`metrics`]: average distortion and mean average precision.

pub mod error;
pub mod geometry;
pub mod graphs;
pub mod linalg;
pub mod metrics;
pub mod training;

pub use error::{Error, Result};
