//! Distortion loss: `L = sum over pairs of |(d_P(x_u, x_v) / d_G(u, v))^2 - 1|`.
//!
//! No scaling is applied to either the graph distances or the embedding
//! distances.

use super::EmbeddingTable;
use crate::error::{Error, Result};
use crate::geometry::{dist, dist_sq_and_grad_both, TangentVector};
use crate::graphs::Triplet;

/// Loss of one batch of triplets under the current embedding.
pub fn distortion_loss(batch: &[Triplet], table: &EmbeddingTable) -> Result<f64> {
    let mut total = 0.0;
    for t in batch {
        if !(t.d > 0.0) {
            return Err(Error::Data(format!("graph distance for ({}, {}) is not positive", t.u, t.v)));
        }
        let d_p = dist(table.point(t.u)?, table.point(t.v)?)?;
        total += ((d_p / t.d).powi(2) - 1.0).abs();
    }
    Ok(total)
}

/// Loss term of one pair plus the ambient Euclidean gradients of that term
/// with respect to both endpoints.
///
/// With `u = d_P^2 / d_G^2 - 1` the term is `|u|` and its derivative
/// against `d_P^2` is `sign(u) / d_G^2`; the squared-distance gradients
/// are then scaled by that weight.
pub fn pair_loss_terms(
    triplet: &Triplet,
    table: &EmbeddingTable,
) -> Result<(f64, TangentVector, TangentVector)> {
    if !(triplet.d > 0.0) {
        return Err(Error::Data(format!(
            "graph distance for ({}, {}) is not positive",
            triplet.u, triplet.v
        )));
    }
    let pu = table.point(triplet.u)?;
    let pv = table.point(triplet.v)?;
    let dg_sq = triplet.d * triplet.d;
    let (f, grad_u, grad_v) = dist_sq_and_grad_both(pu, pv)?;
    let ratio = f / dg_sq - 1.0;
    let loss = ratio.abs();
    // Subgradient of |u| at zero is taken as zero.
    let sign = if ratio > 0.0 {
        1.0
    } else if ratio < 0.0 {
        -1.0
    } else {
        0.0
    };
    let weight = sign / dg_sq;
    Ok((loss, grad_u.scale(weight), grad_v.scale(weight)))
}
