#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slgad::model::{Gradients, ModelParams};
use slgad::train::batch_gradients;
use slgad::{Graph, RunConfig};

/// Connected random graph: a spanning path plus extra random edges, dense
/// positive features.
pub fn random_graph(n: usize, d: usize, extra_edges: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    for _ in 0..extra_edges {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.push((u, v));
        }
    }
    let features = Array2::from_shape_fn((n, d), |_| rng.gen_range(0.0..1.0));
    Graph::new(edges, features, None).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct FdReport {
    pub max_rel_err: f64,
    pub worst: String,
}

/// Compares analytic batch gradients with central differences of the batch loss.
pub fn finite_difference_check(graph: &Graph, params: &ModelParams, cfg: &RunConfig, eps: f64) -> FdReport {
    let targets: Vec<usize> = (0..graph.n_nodes()).collect();
    let loss = |p: &ModelParams| batch_gradients(graph, p, cfg, &targets, 1, 0).unwrap().1.l_total;
    let (grads, _) = batch_gradients(graph, params, cfg, &targets, 1, 0).unwrap();

    let mut report = FdReport {
        max_rel_err: 0.0,
        worst: String::new(),
    };
    let analytic: Vec<Array2<f64>> = grad_list(&grads);
    for (m, analytic) in analytic.iter().enumerate() {
        for idx in 0..analytic.len() {
            let (r, c) = (idx / analytic.ncols(), idx % analytic.ncols());
            let mut plus = params.clone();
            matrix_mut(&mut plus, m)[[r, c]] += eps;
            let mut minus = params.clone();
            matrix_mut(&mut minus, m)[[r, c]] -= eps;
            let numeric = (loss(&plus) - loss(&minus)) / (2.0 * eps);
            let a = analytic[[r, c]];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
            if rel > report.max_rel_err {
                report.max_rel_err = rel;
                report.worst = format!("matrix {m} [{r},{c}]: analytic {a:e} numeric {numeric:e}");
            }
        }
    }
    report
}

fn grad_list(g: &Gradients) -> Vec<Array2<f64>> {
    vec![g.g_w_enc.clone(), g.g_w_dec.clone(), g.g_w_s.clone()]
}

fn matrix_mut(p: &mut ModelParams, m: usize) -> &mut Array2<f64> {
    match m {
        0 => &mut p.w_enc,
        1 => &mut p.w_dec,
        _ => &mut p.w_s,
    }
}

/// Tiny randomized instance for gradient checks: D <= 5, D' <= 3, K <= 3.
pub fn tiny_instance(seed: u64) -> (Graph, ModelParams, RunConfig) {
    let mut r = rng(seed);
    let n = r.gen_range(4..=7);
    let d = r.gen_range(1..=5);
    let d_hidden = r.gen_range(1..=3);
    let k = r.gen_range(1..=3);
    let graph = random_graph(n, d, n, &mut r);
    let params = ModelParams::glorot(d, d_hidden, &mut r);
    let cfg = RunConfig {
        k,
        d_hidden,
        alpha: r.gen_range(0.1..2.0),
        beta: r.gen_range(0.1..2.0),
        batch_size: n,
        negative_ratio: 1,
        seed,
        ..RunConfig::default()
    };
    (graph, params, cfg)
}

/// Quadratic-time AUC: fraction of (positive, negative) pairs ranked correctly, ties count half.
pub fn pairwise_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if labels[i] == 1 && labels[j] == 0 {
                pairs += 1.0;
                if si > sj {
                    wins += 1.0;
                } else if si == sj {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}
