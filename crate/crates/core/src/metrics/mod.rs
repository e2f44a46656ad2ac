//! Embedding fidelity measures.
//!
//! Average distortion is the global metric: the mean relative error
//! between embedding distances and graph distances. Mean average
//! precision (mAP) is the local metric: for every node, the other nodes
//! are ranked by embedding distance and each true neighbor contributes
//! the precision of the smallest ranking prefix that retrieves it.
//!
//! Ranking ties are broken by node id ascending, which makes the measure
//! deterministic and exactly testable.

use crate::error::{Error, Result};
use crate::geometry::dist;
use crate::graphs::{Graph, TripletSet};
use crate::training::EmbeddingTable;
use serde::{Deserialize, Serialize};

/// Evaluation summary. `map` is absent for datasets that carry only
/// fractional distances (no graph structure to rank against).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalResult {
    pub d_avg: f64,
    pub map: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_node_ap: Option<Vec<f64>>,
}

impl EvalResult {
    pub const CSV_HEADER: &'static str = "dataset,space,dim,d_avg,map,seed";

    /// One CSV row `dataset,space,dim,d_avg,map,seed`.
    pub fn csv_row(&self, dataset: &str, space: &str, dim: usize, seed: u64) -> String {
        let map = self.map.map(|m| format!("{m:.6}")).unwrap_or_default();
        format!("{dataset},{space},{dim},{:.6},{map},{seed}", self.d_avg)
    }
}

/// Mean over all records of `|d_P(u, v) - d_G(u, v)| / d_G(u, v)`.
pub fn average_distortion(table: &EmbeddingTable, triplets: &TripletSet) -> Result<f64> {
    if triplets.records.is_empty() {
        return Err(Error::Data("triplet set is empty".into()));
    }
    let mut total = 0.0;
    for t in &triplets.records {
        if !(t.d > 0.0) {
            return Err(Error::Data(format!(
                "graph distance for ({}, {}) is not positive",
                t.u, t.v
            )));
        }
        let d_p = dist(table.point(t.u)?, table.point(t.v)?)?;
        total += (d_p - t.d).abs() / t.d;
    }
    Ok(total / triplets.records.len() as f64)
}

/// Mean average precision of the embedding against the graph neighborhoods.
pub fn mean_average_precision(table: &EmbeddingTable, graph: &Graph) -> Result<f64> {
    Ok(mean_average_precision_detailed(table, graph)?.0)
}

/// mAP plus the per-node average precisions (NaN for skipped isolated
/// nodes).
pub fn mean_average_precision_detailed(
    table: &EmbeddingTable,
    graph: &Graph,
) -> Result<(f64, Vec<f64>)> {
    if graph.num_nodes() != table.node_count() {
        return Err(Error::Data(format!(
            "graph has {} nodes but the table has {}",
            graph.num_nodes(),
            table.node_count()
        )));
    }
    let n = graph.num_nodes();
    let mut row = vec![0.0; n];
    let mut per_node = vec![f64::NAN; n];
    let mut sum = 0.0;
    let mut counted = 0usize;
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            if a != b {
                row[b as usize] = dist(table.point(a)?, table.point(b)?)?;
            }
        }
        if let Some(ap) = node_average_precision(a, &row, graph) {
            per_node[a as usize] = ap;
            sum += ap;
            counted += 1;
        } else {
            log::warn!("node {a} is isolated; skipped in mAP");
        }
    }
    if counted == 0 {
        return Err(Error::Data("every node is isolated; mAP undefined".into()));
    }
    Ok((sum / counted as f64, per_node))
}

/// mAP computed from an arbitrary symmetric distance function; used to
/// check ranking invariances.
pub fn map_with_distance_fn(graph: &Graph, distance: impl Fn(u32, u32) -> f64) -> Result<f64> {
    let n = graph.num_nodes();
    let mut row = vec![0.0; n];
    let mut sum = 0.0;
    let mut counted = 0usize;
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            if a != b {
                row[b as usize] = distance(a, b);
            }
        }
        if let Some(ap) = node_average_precision(a, &row, graph) {
            sum += ap;
            counted += 1;
        }
    }
    if counted == 0 {
        return Err(Error::Data("every node is isolated; mAP undefined".into()));
    }
    Ok(sum / counted as f64)
}

/// Average precision of one node: rank all other nodes by distance (ties
/// by id), and for each true neighbor take the fraction of neighbors in
/// the prefix ending at it. The node itself is excluded from the ranking.
fn node_average_precision(a: u32, distances: &[f64], graph: &Graph) -> Option<f64> {
    let neighbors = graph.neighbors(a);
    if neighbors.is_empty() {
        return None;
    }
    let n = distances.len();
    let mut order: Vec<u32> = (0..n as u32).filter(|&b| b != a).collect();
    order.sort_by(|&x, &y| {
        distances[x as usize].partial_cmp(&distances[y as usize]).unwrap().then(x.cmp(&y))
    });
    let mut is_neighbor = vec![false; n];
    for &b in neighbors {
        is_neighbor[b as usize] = true;
    }
    let mut hits = 0usize;
    let mut precision_sum = 0.0;
    for (idx, &b) in order.iter().enumerate() {
        if is_neighbor[b as usize] {
            hits += 1;
            precision_sum += hits as f64 / (idx + 1) as f64;
        }
    }
    Some(precision_sum / neighbors.len() as f64)
}
