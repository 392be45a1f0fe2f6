//! Build an attributed graph, round-trip it through the TSV layout and
//! normalize the adjacency of an induced subgraph.
//!
//! cargo run --example graph_io

use ndarray::array;
use slgad::graph::normalize_adjacency;
use slgad::Graph;

fn main() -> slgad::Result<()> {
    let features = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]];
    let graph = Graph::new([(0, 1), (1, 2), (2, 3), (1, 0)], features, Some(vec![0, 0, 1, 0]))?;
    println!("{} nodes, {} undirected edges (the duplicate 1-0 collapses)", graph.n_nodes(), graph.n_edges());

    let dir = std::env::temp_dir().join("slgad-graph-io");
    graph.save(&dir)?;
    let back = Graph::load(&dir)?;
    assert_eq!(back.edges().collect::<Vec<_>>(), graph.edges().collect::<Vec<_>>());
    println!("saved and reloaded from {}", dir.display());

    let (x, adj) = back.subgraph(&[0, 1, 2])?;
    let norm = normalize_adjacency(&adj)?;
    println!("features of the path 0-1-2:\n{x}");
    println!("D^-1/2 (A + I) D^-1/2:\n{:.4}", norm.matrix());
    Ok(())
}
