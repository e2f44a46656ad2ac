//! Dataset resolution: a CLI dataset argument is either a generator spec,
//! a directory produced by `generate`, a triplet CSV, or an edge list.

use std::path::Path;
use symspace::error::Result;
use symspace::graphs::{self, all_pairs_shortest_paths, Graph, GraphSpec, TripletSet};

/// A resolved dataset: its name, the training triplets, and the graph
/// when one is available (needed for mAP).
pub struct Dataset {
    pub name: String,
    pub triplets: TripletSet,
    pub graph: Option<Graph>,
}

pub fn resolve(input: &str) -> Result<Dataset> {
    if let Ok(spec) = input.parse::<GraphSpec>() {
        let graph = spec.build()?;
        let triplets = all_pairs_shortest_paths(&graph);
        return Ok(Dataset { name: spec.name(), triplets, graph: Some(graph) });
    }

    let path = Path::new(input);
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());

    if path.is_dir() {
        let triplets_path = path.join("triplets.csv");
        let edges_path = path.join("edges.txt");
        let triplets = graphs::io::load_triplets(&triplets_path)?;
        let graph = if edges_path.exists() {
            Some(graphs::io::load_edge_list(&edges_path)?)
        } else {
            triplets.infer_graph()
        };
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or(stem);
        return Ok(Dataset { name, triplets, graph });
    }

    if input.ends_with(".csv") {
        let triplets = graphs::io::load_triplets(path)?;
        let graph = triplets.infer_graph();
        return Ok(Dataset { name: stem, triplets, graph });
    }

    // Edge list; disconnected graphs are restricted to their largest
    // component because shortest-path distances must be finite.
    let loaded = graphs::io::load_edge_list(path)?;
    let graph = if loaded.is_connected() {
        loaded
    } else {
        let (sub, kept) = loaded.largest_component();
        log::warn!(
            "dataset {stem}: restricted to the largest component ({} of {} nodes)",
            kept.len(),
            loaded.num_nodes()
        );
        sub
    };
    let triplets = all_pairs_shortest_paths(&graph);
    Ok(Dataset { name: stem, triplets, graph: Some(graph) })
}
