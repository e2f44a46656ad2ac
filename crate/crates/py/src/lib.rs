//! Python bindings: spaces, distances, graph generators, training and
//! evaluation. Points cross the boundary as flat `f64` lists in the
//! checkpoint layout (coordinate vector, or row-major real part followed
//! by row-major imaginary part, components concatenated).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use symspace::error::Error;
use symspace::geometry::codec::{decode_point, encode_point};
use symspace::geometry::{
    dist, project_to_space, random_init, ManifoldPoint, SpaceDescriptor,
};
use symspace::graphs::{all_pairs_shortest_paths, Graph, GraphSpec, Triplet, TripletSet};
use symspace::metrics::{average_distortion, mean_average_precision};
use symspace::training::{train as train_rs, EmbeddingTable, TrainConfig};

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::InvalidArgument(_) | Error::ShapeMismatch(_) | Error::SpaceMismatch { .. } => {
            PyValueError::new_err(err.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// An embedding space handle.
#[pyclass(module = "symspace_py")]
struct Space {
    descriptor: SpaceDescriptor,
}

impl Space {
    fn decode(&self, values: &[f64]) -> PyResult<ManifoldPoint> {
        decode_point(&self.descriptor, values).map_err(to_py_err)
    }
}

#[pymethods]
impl Space {
    /// Parse a descriptor such as "siegel:4" or
    /// "product:euclidean:10+poincare:10".
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        let descriptor: SpaceDescriptor = descriptor.parse().map_err(to_py_err)?;
        Ok(Self { descriptor })
    }

    /// Number of free real parameters of the model.
    fn free_params(&self) -> usize {
        self.descriptor.free_params()
    }

    /// Length of the flat point encoding.
    fn point_len(&self) -> usize {
        self.descriptor.point_len()
    }

    /// Deterministic random point near the basepoint.
    fn random_point(&self, seed: u64) -> Vec<f64> {
        let p = random_init(&self.descriptor, seed);
        let mut flat = Vec::with_capacity(self.descriptor.point_len());
        encode_point(&p, &mut flat);
        flat
    }

    /// Distance between two flat-encoded points.
    fn distance(&self, p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
        let p = self.decode(&p)?;
        let q = self.decode(&q)?;
        dist(&p, &q).map_err(to_py_err)
    }

    /// Project a point into the epsilon-interior of the model.
    #[pyo3(signature = (p, epsilon = 1e-4))]
    fn project(&self, p: Vec<f64>, epsilon: f64) -> PyResult<Vec<f64>> {
        let p = self.decode(&p)?;
        let projected = project_to_space(&p, epsilon).map_err(to_py_err)?;
        let mut flat = Vec::with_capacity(self.descriptor.point_len());
        encode_point(&projected, &mut flat);
        Ok(flat)
    }

    /// Distance of a point from the boundary of the model.
    fn invariant_margin(&self, p: Vec<f64>) -> PyResult<f64> {
        self.decode(&p)?.invariant_margin().map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!("Space('{}')", self.descriptor)
    }
}

/// Build a benchmark graph from a generator spec (e.g. "tree:3,5",
/// "grid:5x5x5", "rooted:grid:3x3+tree:2,5"). Returns
/// `(num_nodes, edges)`.
#[pyfunction]
fn build_graph(spec: &str) -> PyResult<(usize, Vec<(u32, u32)>)> {
    let spec: GraphSpec = spec.parse().map_err(to_py_err)?;
    let graph = spec.build().map_err(to_py_err)?;
    Ok((graph.num_nodes(), graph.edges()))
}

/// All-pairs shortest-path triplets `(u, v, d)` of an undirected graph.
#[pyfunction]
fn shortest_path_triplets(
    num_nodes: usize,
    edges: Vec<(u32, u32)>,
) -> PyResult<Vec<(u32, u32, f64)>> {
    let graph = Graph::from_edges(num_nodes, &edges).map_err(to_py_err)?;
    let ts = all_pairs_shortest_paths(&graph);
    Ok(ts.records.iter().map(|t| (t.u, t.v, t.d)).collect())
}

fn triplet_set(node_count: usize, triplets: Vec<(u32, u32, f64)>) -> TripletSet {
    TripletSet {
        node_count,
        records: triplets.into_iter().map(|(u, v, d)| Triplet { u, v, d }).collect(),
    }
}

fn table_from_points(space: &SpaceDescriptor, points: &[Vec<f64>]) -> PyResult<EmbeddingTable> {
    let decoded: Result<Vec<_>, _> = points.iter().map(|p| decode_point(space, p)).collect();
    Ok(EmbeddingTable { space: space.clone(), points: decoded.map_err(to_py_err)?, epoch: 0 })
}

/// Train embeddings with RSGD on the distortion loss. Returns the flat
/// per-node embeddings and the run report as a JSON string.
#[pyfunction]
#[pyo3(signature = (
    node_count, triplets, space, learning_rate = 0.01, batch_size = 512,
    max_grad_norm = 300.0, epochs = 3000, burnin_epochs = 10,
    burnin_factor = 10.0, lr_reduce_factor = 5.0, lr_patience = 50,
    early_stop_patience = 150, epsilon_projection = 1e-4, seed = 42
))]
#[allow(clippy::too_many_arguments)]
fn train(
    node_count: usize,
    triplets: Vec<(u32, u32, f64)>,
    space: &str,
    learning_rate: f64,
    batch_size: usize,
    max_grad_norm: f64,
    epochs: usize,
    burnin_epochs: usize,
    burnin_factor: f64,
    lr_reduce_factor: f64,
    lr_patience: usize,
    early_stop_patience: usize,
    epsilon_projection: f64,
    seed: u64,
) -> PyResult<(Vec<Vec<f64>>, String)> {
    let descriptor: SpaceDescriptor = space.parse().map_err(to_py_err)?;
    let config = TrainConfig {
        learning_rate,
        batch_size,
        max_grad_norm,
        epochs,
        burnin_epochs,
        burnin_factor,
        lr_reduce_factor,
        lr_patience,
        early_stop_patience,
        epsilon_projection,
        seed,
    };
    let ts = triplet_set(node_count, triplets);
    let (table, report) = train_rs(&ts, &descriptor, &config).map_err(to_py_err)?;
    let points = table
        .points
        .iter()
        .map(|p| {
            let mut flat = Vec::with_capacity(descriptor.point_len());
            encode_point(p, &mut flat);
            flat
        })
        .collect();
    let report_json =
        serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((points, report_json))
}

/// Average distortion (and mAP when `edges` are given) of an embedding.
#[pyfunction]
#[pyo3(signature = (space, points, triplets, edges = None))]
fn evaluate(
    space: &str,
    points: Vec<Vec<f64>>,
    triplets: Vec<(u32, u32, f64)>,
    edges: Option<Vec<(u32, u32)>>,
) -> PyResult<(f64, Option<f64>)> {
    let descriptor: SpaceDescriptor = space.parse().map_err(to_py_err)?;
    let table = table_from_points(&descriptor, &points)?;
    let ts = triplet_set(points.len(), triplets);
    let d_avg = average_distortion(&table, &ts).map_err(to_py_err)?;
    let map = match edges {
        Some(edges) => {
            let graph = Graph::from_edges(points.len(), &edges).map_err(to_py_err)?;
            Some(mean_average_precision(&table, &graph).map_err(to_py_err)?)
        }
        None => None,
    };
    Ok((d_avg, map))
}

/// Write a binary checkpoint in the toolkit's format.
#[pyfunction]
fn save_checkpoint(path: &str, space: &str, points: Vec<Vec<f64>>) -> PyResult<()> {
    let descriptor: SpaceDescriptor = space.parse().map_err(to_py_err)?;
    let table = table_from_points(&descriptor, &points)?;
    symspace::training::checkpoint::save_checkpoint(&table, path).map_err(to_py_err)
}

/// Read a binary checkpoint; returns `(space, points)`.
#[pyfunction]
fn load_checkpoint(path: &str) -> PyResult<(String, Vec<Vec<f64>>)> {
    let table = symspace::training::checkpoint::load_checkpoint(path).map_err(to_py_err)?;
    let points = table
        .points
        .iter()
        .map(|p| {
            let mut flat = Vec::with_capacity(table.space.point_len());
            encode_point(p, &mut flat);
            flat
        })
        .collect();
    Ok((table.space.to_string(), points))
}

#[pymodule]
fn symspace_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Space>()?;
    m.add_function(wrap_pyfunction!(build_graph, m)?)?;
    m.add_function(wrap_pyfunction!(shortest_path_triplets, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(save_checkpoint, m)?)?;
    m.add_function(wrap_pyfunction!(load_checkpoint, m)?)?;
    Ok(())
}
