//! One forward pass for a single target: the target's features are
//! reconstructed from both views and scored against its own views and a
//! negative pair.
//!
//! cargo run --example gcn_forward

use slgad::model::forward_full;
use slgad::rng::{stream, Stage};
use slgad::sampler::sample_view_pair;
use slgad::{make_toy_benchmark, ModelParams, SamplerConfig};

fn main() -> slgad::Result<()> {
    let (graph, _) = make_toy_benchmark(40, 1)?;
    let params = ModelParams::glorot(graph.n_features(), 8, &mut stream(0, Stage::Init, 0, 0));
    let cfg = SamplerConfig::new(4);
    let mut rng = stream(0, Stage::TrainView, 0, 0);

    let (v1, v2) = sample_view_pair(&graph, 3, &cfg, &mut rng)?;
    let (n1, n2) = sample_view_pair(&graph, 20, &cfg, &mut rng)?;
    let (_, out) = forward_full(&params, graph.feature_row(3), &v1, &v2, &[(&n1, &n2)])?;

    println!("x_3       = {:.3}", graph.feature_row(3));
    println!("x̂ (view 1) = {:.3}", out.recon[0]);
    println!("positive scores {:.4?}, negative scores {:.4?}", out.pos_scores(), out.neg_scores());
    Ok(())
}
