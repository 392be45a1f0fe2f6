//! Sample two contextual views per target with random walk with restart,
//! and pair every target with another target's views as negatives.
//!
//! cargo run --example rwr_views

use slgad::rng::{stream, Stage};
use slgad::sampler::{negative_partners, sample_view_pair};
use slgad::{make_toy_benchmark, SamplerConfig};

fn main() -> slgad::Result<()> {
    let (graph, _) = make_toy_benchmark(40, 0)?;
    let cfg = SamplerConfig::new(4);

    for target in 0..3 {
        // one stream per target keeps sampling order-independent
        let mut rng = stream(7, Stage::TrainView, 1, target as u64);
        let (a, b) = sample_view_pair(&graph, target, &cfg, &mut rng)?;
        println!("target {target}: view 1 {:?}, view 2 {:?}", a.nodes, b.nodes);
        // the target sits last and its own features are hidden
        assert_eq!(*a.nodes.last().unwrap(), target);
        assert!(a.features.row(a.len() - 1).iter().all(|&x| x == 0.0));
    }

    let partners = negative_partners(6, 2, &mut stream(7, Stage::TrainNegative, 1, 0))?;
    for (r, assignment) in partners.iter().enumerate() {
        println!("negative #{r}: position i borrows the views of {assignment:?}[i]");
    }
    Ok(())
}
