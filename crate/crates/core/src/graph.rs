//! Attributed graph storage and the GCN adjacency normalization.
//!
//! A [`Graph`] is undirected and unweighted. Adjacency is kept as sorted
//! neighbor lists in CSR layout; features are a dense `N × D` matrix.
//! On disk a graph is a directory of three TSV files:
//!
//! - `edges.tsv`: `u<TAB>v` per line, 0-based ids, `#` starts a comment.
//! - `features.tsv`: line `i` holds the `D` tab-separated reals of node `i`.
//! - `labels.tsv` (optional): line `i` is `0` or `1`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

pub const EDGES_FILE: &str = "edges.tsv";
pub const FEATURES_FILE: &str = "features.tsv";
pub const LABELS_FILE: &str = "labels.tsv";

/// Dense boolean adjacency of a small induced subgraph.
pub type LocalAdjacency = Array2<bool>;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    features: Array2<f64>,
    labels: Option<Vec<u8>>,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Duplicate and reversed
    /// edges collapse into one; self-loops and out-of-range ids are errors.
    pub fn new<I>(edges: I, features: Array2<f64>, labels: Option<Vec<u8>>) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = features.nrows();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        if features.ncols() == 0 {
            return Err(Error::InvalidGraph("features have zero columns".into()));
        }
        if let Some((idx, _)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidGraph(format!(
                "non-finite feature at node {} column {}",
                idx.0, idx.1
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::InvalidGraph(format!(
                    "{} labels for {} nodes",
                    labels.len(),
                    n
                )));
            }
            if let Some(i) = labels.iter().position(|&l| l > 1) {
                return Err(Error::InvalidGraph(format!("label of node {i} is not 0 or 1")));
            }
        }

        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for mut list in adj {
            list.sort_unstable();
            list.dedup();
            neighbors.extend(list);
            offsets.push(neighbors.len());
        }
        Ok(Graph {
            offsets,
            neighbors,
            features,
            labels,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// Number of undirected edges.
    pub fn n_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Undirected edges with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_nodes()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn feature_row(&self, node: usize) -> ArrayView1<'_, f64> {
        self.features.row(node)
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    /// Returns a copy of this graph carrying the given labels.
    pub fn with_labels(&self, labels: Vec<u8>) -> Result<Self> {
        Graph::new(self.edges(), self.features.clone(), Some(labels))
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        load_graph(dir)
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        save_graph(self, dir)
    }

    /// Induced subgraph on `nodes`, rows and columns in the given order.
    pub fn subgraph(&self, nodes: &[usize]) -> Result<(Array2<f64>, LocalAdjacency)> {
        subgraph(self, nodes)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn load_graph(dir: impl AsRef<Path>) -> Result<Graph> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "graph directory not found"),
        ));
    }

    let feat_path = dir.join(FEATURES_FILE);
    let text = read(&feat_path)?;
    let mut rows: Vec<f64> = Vec::new();
    let mut n = 0usize;
    let mut d = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let before = rows.len();
        for tok in line.split('\t') {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| Error::parse(&feat_path, lineno + 1, format!("bad number {tok:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(&feat_path, lineno + 1, "non-finite feature value"));
            }
            rows.push(v);
        }
        let width = rows.len() - before;
        match d {
            None => d = Some(width),
            Some(d) if d != width => {
                return Err(Error::parse(
                    &feat_path,
                    lineno + 1,
                    format!("expected {d} columns, found {width}"),
                ))
            }
            _ => {}
        }
        n += 1;
    }
    let d = d.ok_or_else(|| Error::parse(&feat_path, 1, "no feature rows"))?;
    let features = Array2::from_shape_vec((n, d), rows).expect("row widths checked");

    let edge_path = dir.join(EDGES_FILE);
    let text = read(&edge_path)?;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        let (u, v) = match (cols.next(), cols.next(), cols.next()) {
            (Some(u), Some(v), None) => (u.trim(), v.trim()),
            _ => return Err(Error::parse(&edge_path, lineno + 1, "expected `u<TAB>v`")),
        };
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(&edge_path, lineno + 1, format!("bad node id {s:?}")))
        };
        let (u, v) = (parse(u)?, parse(v)?);
        if u >= n || v >= n {
            return Err(Error::parse(
                &edge_path,
                lineno + 1,
                format!("node id out of range 0..{n}"),
            ));
        }
        edges.push((u, v));
    }

    let label_path = dir.join(LABELS_FILE);
    let labels = if label_path.exists() {
        let text = read(&label_path)?;
        let mut labels = Vec::with_capacity(n);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            labels.push(match line {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(Error::parse(
                        &label_path,
                        lineno + 1,
                        format!("label {other:?} is not 0 or 1"),
                    ))
                }
            });
        }
        Some(labels)
    } else {
        None
    };

    Graph::new(edges, features, labels)
}

pub fn save_graph(graph: &Graph, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let write_file = |name: &str, body: &dyn Fn(&mut dyn Write) -> std::io::Result<()>| {
        let path = dir.join(name);
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))
    };

    write_file(EDGES_FILE, &|w| {
        for (u, v) in graph.edges() {
            writeln!(w, "{u}\t{v}")?;
        }
        Ok(())
    })?;
    write_file(FEATURES_FILE, &|w| {
        for row in graph.features.rows() {
            let mut first = true;
            for v in row {
                if !first {
                    w.write_all(b"\t")?;
                }
                first = false;
                // `{}` on f64 prints the shortest representation that parses back exactly.
                write!(w, "{v}")?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    if let Some(labels) = &graph.labels {
        write_file(LABELS_FILE, &|w| {
            for l in labels {
                writeln!(w, "{l}")?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

pub fn subgraph(graph: &Graph, nodes: &[usize]) -> Result<(Array2<f64>, LocalAdjacency)> {
    let n = graph.n_nodes();
    for (i, &u) in nodes.iter().enumerate() {
        if u >= n {
            return Err(Error::InvalidGraph(format!("subgraph node {u} out of range 0..{n}")));
        }
        if nodes[..i].contains(&u) {
            return Err(Error::InvalidGraph(format!("subgraph node {u} repeated")));
        }
    }
    let k = nodes.len();
    let mut features = Array2::zeros((k, graph.n_features()));
    for (row, &u) in nodes.iter().enumerate() {
        features.row_mut(row).assign(&graph.features.row(u));
    }
    let adj = Array2::from_shape_fn((k, k), |(i, j)| i != j && graph.has_edge(nodes[i], nodes[j]));
    Ok((features, adj))
}

/// Symmetrically normalized adjacency with self-loops,
/// `D̃^{-1/2} (A + I) D̃^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdj {
    matrix: Array2<f64>,
}

impl NormalizedAdj {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// Identity normalization of a single node.
    pub fn singleton() -> Self {
        NormalizedAdj {
            matrix: Array2::ones((1, 1)),
        }
    }
}

pub fn normalize_adjacency(adj: &LocalAdjacency) -> Result<NormalizedAdj> {
    let k = adj.nrows();
    if adj.ncols() != k {
        return Err(Error::Shape(format!(
            "adjacency is {}x{}, expected square",
            adj.nrows(),
            adj.ncols()
        )));
    }
    for i in 0..k {
        if adj[[i, i]] {
            return Err(Error::InvalidGraph(format!("adjacency has a self-loop at {i}")));
        }
        for j in (i + 1)..k {
            if adj[[i, j]] != adj[[j, i]] {
                return Err(Error::InvalidGraph(format!(
                    "adjacency is asymmetric at ({i}, {j})"
                )));
            }
        }
    }
    let inv_sqrt_deg: Vec<f64> = adj
        .rows()
        .into_iter()
        .map(|row| 1.0 / ((1 + row.iter().filter(|&&b| b).count()) as f64).sqrt())
        .collect();
    let matrix = Array2::from_shape_fn((k, k), |(i, j)| {
        if i == j || adj[[i, j]] {
            inv_sqrt_deg[i] * inv_sqrt_deg[j]
        } else {
            0.0
        }
    });
    Ok(NormalizedAdj { matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn path3() -> Graph {
        let feats = array![[1.0, 0.0], [0.0, 1.0], [2.0, -1.0]];
        Graph::new([(0, 1), (1, 2)], feats, None).unwrap()
    }

    fn write_dir(edges: &str, features: &str, labels: Option<&str>) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(EDGES_FILE), edges).unwrap();
        fs::write(dir.path().join(FEATURES_FILE), features).unwrap();
        if let Some(l) = labels {
            fs::write(dir.path().join(LABELS_FILE), l).unwrap();
        }
        dir
    }

    #[test]
    fn load_minimal_graph() {
        let dir = write_dir("0\t1\n", "0.5\n-1\n", None);
        let g = load_graph(dir.path()).unwrap();
        assert_eq!((g.n_nodes(), g.n_features(), g.n_edges()), (2, 1, 1));
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert!(g.labels().is_none());
    }

    #[test]
    fn reversed_and_duplicate_edges_collapse() {
        let a = load_graph(write_dir("# comment\n0\t1\n1\t0\n0\t1\n", "1\n2\n", None).path()).unwrap();
        let b = load_graph(write_dir("0\t1\n", "1\n2\n", None).path()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            load_graph("/definitely/not/here"),
            Err(Error::Io { .. })
        ));
        let missing_edges = tempfile::tempdir().unwrap();
        fs::write(missing_edges.path().join(FEATURES_FILE), "1\n").unwrap();
        assert!(matches!(load_graph(missing_edges.path()), Err(Error::Io { .. })));
        // id 2 is not a node when only two feature rows exist
        assert!(load_graph(write_dir("0\t2\n", "1\n2\n", None).path()).is_err());
        assert!(load_graph(write_dir("0\t1\n", "1\nNaN\n", None).path()).is_err());
        assert!(load_graph(write_dir("0\t1\n", "1\ninf\n", None).path()).is_err());
        assert!(load_graph(write_dir("0\t1\n", "1\n2\n", Some("0\n2\n")).path()).is_err());
        assert!(load_graph(write_dir("0\t1\n", "1\n2\n", Some("0\n")).path()).is_err());
        assert!(load_graph(write_dir("0\t1\t1\n", "1\n2\n", None).path()).is_err());
        assert!(load_graph(write_dir("1\t1\n", "1\n2\n", None).path()).is_err());
        assert!(load_graph(write_dir("0\t1\n", "1\t2\n3\n", None).path()).is_err());
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let feats = array![[0.1, 1e-300, -3.75], [1.0 / 3.0, 0.0, 7e22]];
        let g = Graph::new([(0, 1)], feats, Some(vec![1, 0])).unwrap();
        let dir = tempfile::tempdir().unwrap();
        g.save(dir.path()).unwrap();
        assert_eq!(load_graph(dir.path()).unwrap(), g);
    }

    #[test]
    fn normalize_single_node() {
        let adj = Array2::from_elem((1, 1), false);
        assert_eq!(normalize_adjacency(&adj).unwrap().matrix(), &array![[1.0]]);
    }

    #[test]
    fn normalize_two_connected_nodes() {
        let adj = array![[false, true], [true, false]];
        let m = normalize_adjacency(&adj).unwrap();
        let err = (m.matrix() - &array![[0.5, 0.5], [0.5, 0.5]]).mapv(f64::abs);
        assert!(err.iter().all(|&e| e < 1e-12), "{err}");
    }

    #[test]
    fn normalize_path_matches_hand_computation() {
        // D̃ = diag(2, 3, 2); entries are 1/sqrt(d_i d_j) on edges and the diagonal.
        let (_, adj) = path3().subgraph(&[0, 1, 2]).unwrap();
        let m = normalize_adjacency(&adj).unwrap();
        let expected = array![
            [1.0 / 2.0, 1.0 / 6f64.sqrt(), 0.0],
            [1.0 / 6f64.sqrt(), 1.0 / 3.0, 1.0 / 6f64.sqrt()],
            [0.0, 1.0 / 6f64.sqrt(), 1.0 / 2.0]
        ];
        for (a, b) in m.matrix().iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_rejects_bad_input() {
        let asym = array![[false, true], [false, false]];
        assert!(normalize_adjacency(&asym).is_err());
        let diag = array![[true, false], [false, false]];
        assert!(normalize_adjacency(&diag).is_err());
    }

    #[test]
    fn subgraph_cases() {
        let g = path3();
        let (f, a) = g.subgraph(&[1]).unwrap();
        assert_eq!(f, array![[0.0, 1.0]]);
        assert_eq!(a, array![[false]]);

        let (_, a) = g.subgraph(&[0, 1]).unwrap();
        assert_eq!(a, array![[false, true], [true, false]]);

        let (f, a) = g.subgraph(&[2, 0]).unwrap();
        assert_eq!(a, array![[false, false], [false, false]]);
        assert_eq!(f, array![[2.0, -1.0], [1.0, 0.0]]);

        assert!(g.subgraph(&[0, 3]).is_err());
        assert!(g.subgraph(&[0, 0]).is_err());
    }

    #[test]
    fn subgraph_features_are_copies() {
        let g = path3();
        let (mut f, _) = g.subgraph(&[0, 1, 2]).unwrap();
        f.fill(9.0);
        assert_eq!(g.feature_row(0)[0], 1.0);
    }

    #[test]
    fn graph_rejects_invalid_parts() {
        let f = Array2::zeros((2, 1));
        assert!(Graph::new([(0, 0)], f.clone(), None).is_err());
        assert!(Graph::new([(0, 5)], f.clone(), None).is_err());
        assert!(Graph::new([(0, 1)], f.clone(), Some(vec![0])).is_err());
        assert!(Graph::new([(0, 1)], f, Some(vec![0, 3])).is_err());
    }
}
