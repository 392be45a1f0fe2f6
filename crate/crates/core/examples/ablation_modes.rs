//! Compare the full detector with each ablated variant on the toy graph.
//!
//! cargo run --release --example ablation_modes

use slgad::config::Mode;
use slgad::{make_toy_benchmark, roc_auc, score_all, train, RunConfig};

fn main() -> slgad::Result<()> {
    let (graph, _) = make_toy_benchmark(100, 2)?;
    let labels = graph.labels().unwrap();
    for mode in Mode::ALL {
        let cfg = RunConfig {
            mode,
            ..RunConfig::preset("toy")?
        };
        let (params, _) = train(&graph, &cfg)?;
        let auc = roc_auc(&score_all(&graph, &params, &cfg)?.final_scores, labels)?.auc;
        println!("{mode:<10} AUC {auc:.4}");
    }
    Ok(())
}
