//! Compare the hand-derived batch gradient with central finite differences
//! on a tiny instance.
//!
//! cargo run --example gradient_check

use slgad::model::ModelParams;
use slgad::rng::{stream, Stage};
use slgad::train::batch_gradients;
use slgad::{make_toy_benchmark, RunConfig};

fn main() -> slgad::Result<()> {
    let (graph, _) = make_toy_benchmark(24, 2)?;
    let cfg = RunConfig {
        k: 3,
        d_hidden: 3,
        batch_size: 24,
        ..RunConfig::default()
    };
    let params = ModelParams::glorot(graph.n_features(), 3, &mut stream(1, Stage::Init, 0, 0));
    let targets: Vec<usize> = (0..graph.n_nodes()).collect();
    let loss = |p: &ModelParams| batch_gradients(&graph, p, &cfg, &targets, 1, 0).map(|r| r.1.l_total);
    let (grads, _) = batch_gradients(&graph, &params, &cfg, &targets, 1, 0)?;

    let eps = 1e-5;
    for (name, g) in grads.named() {
        let mut worst: f64 = 0.0;
        for idx in 0..g.len() {
            let (r, c) = (idx / g.ncols(), idx % g.ncols());
            let mut plus = params.clone();
            let mut minus = params.clone();
            bump(&mut plus, name, r, c, eps);
            bump(&mut minus, name, r, c, -eps);
            let numeric = (loss(&plus)? - loss(&minus)?) / (2.0 * eps);
            let rel = (g[[r, c]] - numeric).abs() / g[[r, c]].abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        }
        println!("{name}: max relative error {worst:.2e} over {} entries", g.len());
    }
    Ok(())
}

fn bump(p: &mut ModelParams, name: &str, r: usize, c: usize, by: f64) {
    for (n, m) in p.named_mut() {
        if n == name {
            m[[r, c]] += by;
        }
    }
}
