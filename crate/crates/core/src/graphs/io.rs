//! Dataset ingestion and emission.
//!
//! Edge lists are whitespace-separated `u v` pairs, one per line, with `#`
//! comments. Triplet files are CSV rows `u,v,d`; the distance may be
//! fractional for weighted datasets.

use super::{Graph, Triplet, TripletSet};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

/// Read an edge-list file. Node count is the largest id plus one.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    let mut edges = Vec::new();
    let mut max_id = 0u32;
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (u, v) = match (it.next(), it.next()) {
            (Some(u), Some(v)) => (u, v),
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected 'u v', got '{line}'"),
                })
            }
        };
        let u: u32 = u.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("invalid node id '{u}'"),
        })?;
        let v: u32 = v.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("invalid node id '{v}'"),
        })?;
        if u == v {
            return Err(Error::Parse { line: idx + 1, msg: format!("self-loop at node {u}") });
        }
        max_id = max_id.max(u).max(v);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(Error::Data("edge list is empty".into()));
    }
    Graph::from_edges(max_id as usize + 1, &edges)
}

/// Read a triplet CSV. Pairs are normalized to `u < v`; duplicates keep
/// the first distance and log a warning.
pub fn load_triplets(path: impl AsRef<Path>) -> Result<TripletSet> {
    let text = fs::read_to_string(path)?;
    let mut seen: HashMap<(u32, u32), usize> = HashMap::new();
    let mut records = Vec::new();
    let mut max_id = 0u32;
    let mut duplicates = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected 'u,v,d', got '{line}'"),
            });
        }
        let u: u32 = fields[0].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("invalid node id '{}'", fields[0]),
        })?;
        let v: u32 = fields[1].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("invalid node id '{}'", fields[1]),
        })?;
        let d: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("invalid distance '{}'", fields[2]),
        })?;
        if u == v {
            return Err(Error::Parse { line: idx + 1, msg: format!("pair ({u}, {v}) is degenerate") });
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("distance must be positive and finite, got {d}"),
            });
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key, idx).is_some() {
            duplicates += 1;
            continue;
        }
        max_id = max_id.max(u).max(v);
        records.push(Triplet { u: key.0, v: key.1, d });
    }
    if duplicates > 0 {
        log::warn!("dropped {duplicates} duplicate triplet row(s)");
    }
    if records.is_empty() {
        return Err(Error::Data("triplet file is empty".into()));
    }
    Ok(TripletSet { node_count: max_id as usize + 1, records })
}

pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "# {} nodes, {} edges", g.num_nodes(), g.num_edges())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn save_triplets(ts: &TripletSet, path: impl AsRef<Path>) -> Result<()> {
    let mut out = fs::File::create(path)?;
    for t in &ts.records {
        if (t.d - t.d.round()).abs() < 1e-12 {
            writeln!(out, "{},{},{}", t.u, t.v, t.d as i64)?;
        } else {
            writeln!(out, "{},{},{}", t.u, t.v, t.d)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{all_pairs_shortest_paths, make_tree};
    use tempfile::tempdir;

    #[test]
    fn edge_list_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("edges.txt");
        let g = make_tree(2, 3).unwrap();
        save_edge_list(&g, &path).unwrap();
        let loaded = load_edge_list(&path).unwrap();
        assert_eq!(loaded.edges(), g.edges());
    }

    #[test]
    fn two_line_edge_file_is_a_path() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("edges.txt");
        std::fs::write(&path, "0 1\n1 2\n").unwrap();
        let g = load_edge_list(&path).unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn duplicate_edges_load_once() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("edges.txt");
        std::fs::write(&path, "0 1\n1 0\n# comment\n\n0 1\n").unwrap();
        let g = load_edge_list(&path).unwrap();
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn malformed_edge_line_reports_line_number() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("edges.txt");
        std::fs::write(&path, "0 1\nbroken\n").unwrap();
        match load_edge_list(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn triplets_round_trip_counts() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("triplets.csv");
        let ts = all_pairs_shortest_paths(&make_tree(2, 3).unwrap());
        save_triplets(&ts, &path).unwrap();
        let loaded = load_triplets(&path).unwrap();
        assert_eq!(loaded.node_count, ts.node_count);
        assert_eq!(loaded.records.len(), ts.records.len());
        for (a, b) in loaded.records.iter().zip(&ts.records) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn fractional_distances_are_preserved() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("triplets.csv");
        std::fs::write(&path, "0,1,350.5\n0,2,1.25\n1,2,2\n").unwrap();
        let ts = load_triplets(&path).unwrap();
        assert_eq!(ts.records[0].d, 350.5);
        assert!(ts.infer_graph().is_none());
    }

    #[test]
    fn triplet_errors_carry_the_row() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("triplets.csv");
        std::fs::write(&path, "0,1,1\n0,1\n").unwrap();
        match load_triplets(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        std::fs::write(&path, "0,1,0\n").unwrap();
        assert!(load_triplets(&path).is_err());
    }
}
