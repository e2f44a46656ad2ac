//! Benchmark graphs and training triplets.
//!
//! Undirected, unweighted graphs with sorted adjacency lists; generators
//! for grids, complete trees and their Cartesian and rooted products; and
//! BFS all-pairs shortest paths producing the `(u, v, d)` training records.

pub mod generators;
pub mod io;

pub use generators::{cartesian_product, make_grid, make_tree, rooted_product, GraphSpec};

use crate::error::{Error, Result};
use std::collections::VecDeque;

/// Undirected graph without self-loops or duplicate edges.
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Build from an edge list; edges are deduplicated (with a log
    /// warning), self-loops are rejected.
    pub fn from_edges(num_nodes: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); num_nodes];
        let mut duplicates = 0usize;
        for &(u, v) in edges {
            if u == v {
                return Err(Error::Data(format!("self-loop at node {u}")));
            }
            let (a, b) = (u as usize, v as usize);
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::Data(format!("edge ({u}, {v}) exceeds node count {num_nodes}")));
            }
            if adjacency[a].contains(&v) {
                duplicates += 1;
                continue;
            }
            adjacency[a].push(v);
            adjacency[b].push(u);
        }
        if duplicates > 0 {
            log::warn!("dropped {duplicates} duplicate edge(s)");
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { adjacency, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.num_nodes());
        self.labels = Some(labels);
        self
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: u32) -> &[u32] {
        &self.adjacency[u as usize]
    }

    pub fn degree(&self, u: u32) -> usize {
        self.adjacency[u as usize].len()
    }

    pub fn label(&self, u: u32) -> Option<&str> {
        self.labels.as_ref().map(|l| l[u as usize].as_str())
    }

    /// Sorted edge list with `u < v`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, list) in self.adjacency.iter().enumerate() {
            for &v in list {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }

    /// BFS distances from `start`; `u32::MAX` marks unreachable nodes.
    pub fn bfs_distances(&self, start: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.num_nodes()];
        dist[start as usize] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in self.neighbors(u) {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.num_nodes() == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(|&d| d != u32::MAX)
    }

    /// Restrict to the largest connected component, relabeling nodes in
    /// ascending original order. Returns the subgraph and the original ids.
    pub fn largest_component(&self) -> (Graph, Vec<u32>) {
        let n = self.num_nodes();
        let mut component = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0usize;
            let mut queue = VecDeque::new();
            component[start] = id;
            queue.push_back(start as u32);
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in self.neighbors(u) {
                    if component[v as usize] == usize::MAX {
                        component[v as usize] = id;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        let best = sizes.iter().enumerate().max_by_key(|(_, &s)| s).map(|(i, _)| i).unwrap_or(0);
        let keep: Vec<u32> = (0..n as u32).filter(|&u| component[u as usize] == best).collect();
        if keep.len() < n {
            log::warn!(
                "graph is disconnected; keeping largest component ({} of {n} nodes)",
                keep.len()
            );
        }
        let mut remap = vec![u32::MAX; n];
        for (new, &old) in keep.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let mut edges = Vec::new();
        for (u, v) in self.edges() {
            if remap[u as usize] != u32::MAX && remap[v as usize] != u32::MAX {
                edges.push((remap[u as usize], remap[v as usize]));
            }
        }
        let sub = Graph::from_edges(keep.len(), &edges).expect("component edges are valid");
        (sub, keep)
    }
}

/// One training record: an unordered node pair and its graph distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triplet {
    pub u: u32,
    pub v: u32,
    pub d: f64,
}

/// The set of `(u, v, d)` records over one graph or dataset.
#[derive(Debug, Clone)]
pub struct TripletSet {
    pub node_count: usize,
    pub records: Vec<Triplet>,
}

impl TripletSet {
    /// Reconstruct adjacency from integer-valued distances: nodes at
    /// distance one are neighbors. Returns `None` when the distances are
    /// fractional (weighted datasets), where no graph structure exists.
    pub fn infer_graph(&self) -> Option<Graph> {
        let integral = self
            .records
            .iter()
            .all(|t| (t.d - t.d.round()).abs() < 1e-9 && t.d >= 1.0 - 1e-9);
        if !integral {
            return None;
        }
        let edges: Vec<(u32, u32)> = self
            .records
            .iter()
            .filter(|t| (t.d - 1.0).abs() < 1e-9)
            .map(|t| (t.u, t.v))
            .collect();
        Graph::from_edges(self.node_count, &edges).ok()
    }
}

/// BFS from every node; one record per unordered pair of connected nodes.
/// Unreachable pairs are skipped with a log warning.
pub fn all_pairs_shortest_paths(g: &Graph) -> TripletSet {
    let n = g.num_nodes();
    let mut records = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    let mut skipped = 0usize;
    for u in 0..n as u32 {
        let dist = g.bfs_distances(u);
        for v in (u + 1)..n as u32 {
            let d = dist[v as usize];
            if d == u32::MAX {
                skipped += 1;
            } else {
                records.push(Triplet { u, v, d: d as f64 });
            }
        }
    }
    if skipped > 0 {
        log::warn!("omitted {skipped} disconnected pair(s) from the triplet set");
    }
    TripletSet { node_count: n, records }
}
