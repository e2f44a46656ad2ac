//! One RSGD step: accumulate Euclidean batch gradients per node, convert
//! to Riemannian gradients, clip, retract (`theta + v`) and project back
//! into the epsilon-interior of the model.

use super::{loss::pair_loss_terms, EmbeddingTable, TrainConfig};
use crate::error::{Error, Result};
use crate::geometry::{project_with_flag, riemannian_grad, TangentVector};
use crate::graphs::Triplet;
use std::collections::HashMap;

/// Bookkeeping of one optimizer step.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub loss: f64,
    /// Nodes whose update left the model and had to be projected.
    pub projected_nodes: usize,
    /// Nodes whose Riemannian gradient exceeded the clipping threshold.
    pub clipped_nodes: usize,
}

/// Apply one batch. Nodes untouched by the batch are left unchanged.
pub fn rsgd_step(
    table: &mut EmbeddingTable,
    batch: &[Triplet],
    lr: f64,
    config: &TrainConfig,
) -> Result<StepStats> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("batch must be non-empty".into()));
    }

    // Euclidean gradient accumulation per touched node, in batch order so
    // runs are reproducible.
    let mut grads: HashMap<u32, TangentVector> = HashMap::new();
    let mut stats = StepStats::default();
    for t in batch {
        let (loss, gu, gv) = pair_loss_terms(t, table)?;
        stats.loss += loss;
        for (node, grad) in [(t.u, gu), (t.v, gv)] {
            match grads.get_mut(&node) {
                Some(acc) => *acc = TangentVector(acc.0.add_scaled(&grad.0, 1.0)),
                None => {
                    grads.insert(node, grad);
                }
            }
        }
    }

    let mut touched: Vec<u32> = grads.keys().copied().collect();
    touched.sort_unstable();
    for node in touched {
        let euclidean = &grads[&node];
        let point = table.point(node)?;
        let mut grad = riemannian_grad(point, euclidean)?;
        if !grad.is_finite() {
            return Err(Error::NonFiniteGradient { node: node as usize });
        }
        // Direction-preserving clip: g * min(1, max_norm / ||g||).
        let norm = grad.norm();
        if norm > config.max_grad_norm {
            grad = grad.scale(config.max_grad_norm / norm);
            stats.clipped_nodes += 1;
        }
        let stepped = point.retract(&grad.scale(-lr));
        let (projected, changed) = project_with_flag(&stepped, config.epsilon_projection)?;
        if changed {
            stats.projected_nodes += 1;
        }
        table.points[node as usize] = projected;
    }
    Ok(stats)
}
