//! Synthetic benchmark graph generators.
//!
//! Node numbering is deterministic so runs are reproducible: row-major for
//! grids, BFS order for trees, `g_index * |V(h)| + h_index` for products.
//! The default root of attached copies is node 0, which is the corner of a
//! grid (lexicographically smallest coordinate) and the root of a tree.

use super::Graph;
use crate::error::{Error, Result};
use std::str::FromStr;

/// Lattice graph over the given extents; edges connect nodes differing by
/// one in exactly one coordinate.
pub fn make_grid(dims: &[usize]) -> Result<Graph> {
    if dims.is_empty() || dims.len() > 6 {
        return Err(Error::InvalidArgument(format!(
            "grid needs between 1 and 6 dimensions, got {}",
            dims.len()
        )));
    }
    if dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidArgument("every grid extent must be at least 2".into()));
    }
    let num_nodes: usize = dims.iter().product();
    // Row-major strides: the last coordinate varies fastest.
    let mut strides = vec![1usize; dims.len()];
    for axis in (0..dims.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * dims[axis + 1];
    }
    let mut edges = Vec::new();
    let mut coords = vec![0usize; dims.len()];
    for id in 0..num_nodes {
        for (axis, &extent) in dims.iter().enumerate() {
            if coords[axis] + 1 < extent {
                edges.push((id as u32, (id + strides[axis]) as u32));
            }
        }
        for axis in (0..dims.len()).rev() {
            coords[axis] += 1;
            if coords[axis] < dims[axis] {
                break;
            }
            coords[axis] = 0;
        }
    }
    Graph::from_edges(num_nodes, &edges)
}

/// Complete rooted tree with the given branching factor and height, in BFS
/// order with the root at node 0 (labelled "root").
pub fn make_tree(valency: usize, height: usize) -> Result<Graph> {
    if valency == 0 {
        return Err(Error::InvalidArgument("tree valency must be at least 1".into()));
    }
    let mut num_nodes = 1usize;
    let mut level = 1usize;
    for _ in 0..height {
        level *= valency;
        num_nodes += level;
    }
    let mut edges = Vec::with_capacity(num_nodes.saturating_sub(1));
    let mut next_child = 1u32;
    for parent in 0..num_nodes as u32 {
        for _ in 0..valency {
            if (next_child as usize) >= num_nodes {
                break;
            }
            edges.push((parent, next_child));
            next_child += 1;
        }
    }
    let mut labels = vec![String::new(); num_nodes];
    labels[0] = "root".to_string();
    Ok(Graph::from_edges(num_nodes, &edges)?.with_labels(labels))
}

/// Cartesian product: nodes `V(g) x V(h)`, an edge when one coordinate is
/// equal and the other pair is an edge.
pub fn cartesian_product(g: &Graph, h: &Graph) -> Result<Graph> {
    if g.num_nodes() == 0 || h.num_nodes() == 0 {
        return Err(Error::InvalidArgument("product factors must be non-empty".into()));
    }
    let hn = h.num_nodes() as u32;
    let num_nodes = g.num_nodes() * h.num_nodes();
    let mut edges = Vec::with_capacity(
        g.num_nodes() * h.num_edges() + h.num_nodes() * g.num_edges(),
    );
    for gu in 0..g.num_nodes() as u32 {
        for (hu, hv) in h.edges() {
            edges.push((gu * hn + hu, gu * hn + hv));
        }
    }
    for (gu, gv) in g.edges() {
        for hu in 0..hn {
            edges.push((gu * hn + hu, gv * hn + hu));
        }
    }
    Graph::from_edges(num_nodes, &edges)
}

/// Rooted product: one copy of `h` per vertex of `g`, with the copy roots
/// identified with `g`'s vertices.
pub fn rooted_product(g: &Graph, h: &Graph, h_root: u32) -> Result<Graph> {
    if (h_root as usize) >= h.num_nodes() {
        return Err(Error::InvalidArgument(format!(
            "root {h_root} is not a node of the inner graph ({} nodes)",
            h.num_nodes()
        )));
    }
    let hn = h.num_nodes() as u32;
    let num_nodes = g.num_nodes() * h.num_nodes();
    let mut edges = Vec::with_capacity(g.num_edges() + g.num_nodes() * h.num_edges());
    for gu in 0..g.num_nodes() as u32 {
        for (hu, hv) in h.edges() {
            edges.push((gu * hn + hu, gu * hn + hv));
        }
    }
    for (gu, gv) in g.edges() {
        edges.push((gu * hn + h_root, gv * hn + h_root));
    }
    Graph::from_edges(num_nodes, &edges)
}

/// Parsed generator specification.
///
/// Grammar: `tree:V,H` | `grid:D1xD2x...` |
/// `cartesian:SPEC+SPEC` | `rooted:OUTER+INNER` (copies of INNER rooted at
/// node 0 attached to every vertex of OUTER).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Tree { valency: usize, height: usize },
    Grid { dims: Vec<usize> },
    Cartesian { a: Box<GraphSpec>, b: Box<GraphSpec> },
    Rooted { outer: Box<GraphSpec>, inner: Box<GraphSpec>, root: u32 },
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            Self::Tree { valency, height } => make_tree(*valency, *height),
            Self::Grid { dims } => make_grid(dims),
            Self::Cartesian { a, b } => cartesian_product(&a.build()?, &b.build()?),
            Self::Rooted { outer, inner, root } => {
                rooted_product(&outer.build()?, &inner.build()?, *root)
            }
        }
    }

    /// Short deterministic name usable as a directory component.
    pub fn name(&self) -> String {
        match self {
            Self::Tree { valency, height } => format!("tree_{valency}_{height}"),
            Self::Grid { dims } => {
                let parts: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
                format!("grid_{}", parts.join("x"))
            }
            Self::Cartesian { a, b } => format!("cartesian_{}_{}", a.name(), b.name()),
            Self::Rooted { outer, inner, .. } => {
                format!("rooted_{}_{}", outer.name(), inner.name())
            }
        }
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("cartesian:") {
            let (a, b) = split_product(rest)?;
            return Ok(Self::Cartesian { a: Box::new(a.parse()?), b: Box::new(b.parse()?) });
        }
        if let Some(rest) = s.strip_prefix("rooted:") {
            let (outer, inner) = split_product(rest)?;
            return Ok(Self::Rooted {
                outer: Box::new(outer.parse()?),
                inner: Box::new(inner.parse()?),
                root: 0,
            });
        }
        if let Some(rest) = s.strip_prefix("tree:") {
            let (v, h) = rest.split_once(',').ok_or_else(|| {
                Error::InvalidArgument(format!("tree spec '{rest}' must be valency,height"))
            })?;
            return Ok(Self::Tree {
                valency: parse_num(v)?,
                height: parse_num(h)?,
            });
        }
        if let Some(rest) = s.strip_prefix("grid:") {
            let dims: Result<Vec<usize>> = rest.split('x').map(parse_num).collect();
            return Ok(Self::Grid { dims: dims? });
        }
        Err(Error::InvalidArgument(format!("unknown generator spec '{s}'")))
    }
}

fn split_product(s: &str) -> Result<(&str, &str)> {
    s.split_once('+')
        .ok_or_else(|| Error::InvalidArgument(format!("product spec '{s}' must have two parts")))
}

fn parse_num(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("invalid number '{s}' in generator spec")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::all_pairs_shortest_paths;

    fn k1() -> Graph {
        Graph::from_edges(1, &[]).unwrap()
    }

    fn counts(g: &Graph) -> (usize, usize, usize) {
        let ts = all_pairs_shortest_paths(g);
        (g.num_nodes(), g.num_edges(), ts.records.len())
    }

    #[test]
    fn grid_dataset_rows() {
        assert_eq!(counts(&make_grid(&[5, 5, 5]).unwrap()), (125, 300, 7750));
        assert_eq!(counts(&make_grid(&[4, 4, 4, 4]).unwrap()), (256, 768, 32640));
        assert_eq!(counts(&make_grid(&[2]).unwrap()), (2, 1, 1));
    }

    #[test]
    fn tree_dataset_rows() {
        assert_eq!(counts(&make_tree(3, 5).unwrap()), (364, 363, 66066));
        let t = make_tree(2, 3).unwrap();
        assert_eq!((t.num_nodes(), t.num_edges()), (15, 14));
        assert_eq!(t.label(0), Some("root"));
    }

    #[test]
    fn unary_tree_is_a_path() {
        let t = make_tree(1, 4).unwrap();
        assert_eq!(t.num_nodes(), 5);
        assert_eq!(t.num_edges(), 4);
        assert_eq!(t.degree(0), 1);
        assert_eq!(t.degree(2), 2);
    }

    #[test]
    fn cartesian_product_rows() {
        let tree_grid =
            cartesian_product(&make_tree(2, 3).unwrap(), &make_grid(&[3, 3]).unwrap()).unwrap();
        assert_eq!(counts(&tree_grid), (135, 306, 9045));
        let tree_tree =
            cartesian_product(&make_tree(2, 3).unwrap(), &make_tree(2, 3).unwrap()).unwrap();
        assert_eq!(counts(&tree_tree), (225, 420, 25200));
    }

    #[test]
    fn cartesian_identity_element() {
        let h = make_grid(&[3, 2]).unwrap();
        let p = cartesian_product(&k1(), &h).unwrap();
        assert_eq!(p.num_nodes(), h.num_nodes());
        assert_eq!(p.edges(), h.edges());
    }

    #[test]
    fn cartesian_edge_count_identity() {
        let g = make_tree(2, 2).unwrap();
        let h = make_grid(&[2, 3]).unwrap();
        let p = cartesian_product(&g, &h).unwrap();
        assert_eq!(
            p.num_edges(),
            g.num_nodes() * h.num_edges() + h.num_nodes() * g.num_edges()
        );
    }

    #[test]
    fn cartesian_is_commutative_up_to_isomorphism() {
        let g = make_tree(2, 2).unwrap();
        let h = make_grid(&[2, 2]).unwrap();
        let gh = cartesian_product(&g, &h).unwrap();
        let hg = cartesian_product(&h, &g).unwrap();
        assert_eq!(gh.num_nodes(), hg.num_nodes());
        assert_eq!(gh.num_edges(), hg.num_edges());
        let mut d1: Vec<f64> =
            all_pairs_shortest_paths(&gh).records.iter().map(|t| t.d).collect();
        let mut d2: Vec<f64> =
            all_pairs_shortest_paths(&hg).records.iter().map(|t| t.d).collect();
        d1.sort_by(|a, b| a.partial_cmp(b).unwrap());
        d2.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(d1, d2);
    }

    #[test]
    fn rooted_product_rows() {
        // Tree(2,4) with a 4x4 grid attached at its corner per node.
        let outer = make_tree(2, 4).unwrap();
        let inner = make_grid(&[4, 4]).unwrap();
        let g = rooted_product(&outer, &inner, 0).unwrap();
        assert_eq!(counts(&g), (496, 774, 122760));

        // Grid(3,3) with a Tree(2,5) attached at its root per node.
        let outer = make_grid(&[3, 3]).unwrap();
        let inner = make_tree(2, 5).unwrap();
        let g = rooted_product(&outer, &inner, 0).unwrap();
        assert_eq!(counts(&g), (567, 570, 160461));
    }

    #[test]
    fn rooted_product_edge_identity() {
        let g = make_grid(&[2, 3]).unwrap();
        let h = make_tree(2, 2).unwrap();
        for root in [0u32, 3] {
            let p = rooted_product(&g, &h, root).unwrap();
            assert_eq!(p.num_edges(), g.num_edges() + g.num_nodes() * h.num_edges());
            assert_eq!(p.num_nodes(), g.num_nodes() * h.num_nodes());
        }
    }

    #[test]
    fn rooted_product_with_single_node_copies() {
        let g = make_grid(&[3, 3]).unwrap();
        let p = rooted_product(&g, &k1(), 0).unwrap();
        assert_eq!(p.edges(), g.edges());
    }

    #[test]
    fn rooted_product_rejects_bad_root() {
        let g = make_grid(&[2, 2]).unwrap();
        assert!(rooted_product(&g, &g, 99).is_err());
    }

    #[test]
    fn grid_argument_errors() {
        assert!(make_grid(&[]).is_err());
        assert!(make_grid(&[1, 3]).is_err());
        assert!(make_grid(&[2; 7]).is_err());
    }

    #[test]
    fn spec_parsing_and_building() {
        let spec: GraphSpec = "tree:3,5".parse().unwrap();
        assert_eq!(spec, GraphSpec::Tree { valency: 3, height: 5 });
        assert_eq!(spec.build().unwrap().num_nodes(), 364);

        let spec: GraphSpec = "grid:4x4x4x4".parse().unwrap();
        assert_eq!(spec.build().unwrap().num_nodes(), 256);

        let spec: GraphSpec = "rooted:grid:3x3+tree:2,5".parse().unwrap();
        let g = spec.build().unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (567, 570));
        assert_eq!(spec.name(), "rooted_grid_3x3_tree_2_5");

        let spec: GraphSpec = "cartesian:tree:2,3+grid:3x3".parse().unwrap();
        assert_eq!(spec.build().unwrap().num_nodes(), 135);

        assert!("mystery:1".parse::<GraphSpec>().is_err());
        assert!("tree:3".parse::<GraphSpec>().is_err());
    }
}
