//! Score every node of a trained model over several evaluation rounds and
//! measure ROC AUC against the injected labels.
//!
//! cargo run --release --example score_and_eval

use slgad::{make_toy_benchmark, roc_auc, score_all, train, RunConfig};

fn main() -> slgad::Result<()> {
    let (graph, manifest) = make_toy_benchmark(100, 4)?;
    let cfg = RunConfig::preset("toy")?;
    let (params, _) = train(&graph, &cfg)?;
    let table = score_all(&graph, &params, &cfg)?;

    println!("top 10 by final score ({} rounds):", table.rounds_used);
    let anomalies = manifest.anomalies();
    for &node in table.ranking().iter().take(10) {
        let mark = if anomalies.contains(&node) { "*" } else { " " };
        println!(
            "{mark} node {node:>3}  final {:.3}  gen {:.3}  con {:.3}",
            table.final_scores[node], table.scaled_gen[node], table.scaled_con[node]
        );
    }

    let curve = roc_auc(&table.final_scores, graph.labels().unwrap())?;
    println!("AUC {:.4} over {} ROC points", curve.auc, curve.thresholds.len());
    Ok(())
}
