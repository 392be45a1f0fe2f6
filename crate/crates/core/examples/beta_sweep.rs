//! Sweep the generative weight β and keep the best run.
//!
//! cargo run --release --example beta_sweep

use slgad::config::BETA_SWEEP;
use slgad::{make_toy_benchmark, roc_auc, score_all, train, RunConfig};

fn main() -> slgad::Result<()> {
    let (graph, _) = make_toy_benchmark(100, 1)?;
    let mut best = (0.0, 0.0);
    for beta in BETA_SWEEP {
        let cfg = RunConfig {
            beta,
            ..RunConfig::preset("toy")?
        };
        let (params, _) = train(&graph, &cfg)?;
        let auc = roc_auc(&score_all(&graph, &params, &cfg)?.final_scores, graph.labels().unwrap())?.auc;
        println!("beta {beta:.1}  AUC {auc:.4}");
        if auc > best.1 {
            best = (beta, auc);
        }
    }
    println!("best beta {} (AUC {:.4})", best.0, best.1);
    Ok(())
}
