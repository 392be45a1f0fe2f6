//! Train on the planted-anomaly toy graph and save a checkpoint.
//!
//! cargo run --release --example train_toy

use slgad::checkpoint::Checkpoint;
use slgad::{make_toy_benchmark, train, RunConfig};

fn main() -> slgad::Result<()> {
    let (graph, manifest) = make_toy_benchmark(100, 0)?;
    println!("{} nodes, {} edges, anomalies {:?}", graph.n_nodes(), graph.n_edges(), manifest.anomalies());

    let cfg = RunConfig::preset("toy")?;
    let (params, log) = train(&graph, &cfg)?;
    for e in log.epochs.iter().filter(|e| e.epoch % 10 == 0 || e.epoch == 1) {
        println!("epoch {:>3}  l_gen {:.4}  l_con {:.4}  l_total {:.4}", e.epoch, e.l_gen, e.l_con, e.l_total);
    }

    let path = std::env::temp_dir().join("slgad-toy.checkpoint");
    let ck = Checkpoint {
        params,
        config_hash: cfg.hash(),
    };
    ck.save(&path)?;
    assert_eq!(Checkpoint::load(&path)?, ck);
    println!("checkpoint written to {}", path.display());
    Ok(())
}
