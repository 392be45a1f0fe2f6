//! Plant structural (clique) and attribute (feature swap) anomalies into a
//! clean graph and inspect the manifest.
//!
//! cargo run --example inject_anomalies

use ndarray::Array2;
use rand::Rng;
use slgad::rng::{stream, Stage};
use slgad::{inject_anomalies, Graph, InjectionConfig};

fn main() -> slgad::Result<()> {
    let mut rng = stream(3, Stage::Toy, 0, 0);
    let n = 200;
    let edges: Vec<(usize, usize)> = (0..3 * n)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .filter(|(u, v)| u != v)
        .collect();
    let features = Array2::from_shape_fn((n, 10), |_| rng.gen_range(0.0..1.0));
    let clean = Graph::new(edges, features, None)?;

    let cfg = InjectionConfig {
        clique_size: 6,
        n_cliques: 3,
        n_attr: 18,
        ..InjectionConfig::default()
    };
    let (dirty, manifest) = inject_anomalies(&clean, &cfg, &mut stream(cfg.seed, Stage::Inject, 0, 0))?;
    println!("edges {} -> {}", clean.n_edges(), dirty.n_edges());
    println!("{} labeled anomalies", dirty.labels().unwrap().iter().filter(|&&l| l == 1).count());

    for &(node, source) in manifest.attributes.iter().take(3) {
        let moved = &clean.feature_row(node) - &clean.feature_row(source);
        println!("node {node} took the features of {source} (distance {:.3})", moved.dot(&moved).sqrt());
    }
    print!("{}", manifest.to_tsv().lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    Ok(())
}
