use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::inject::{inject_anomalies, InjectionConfig, Manifest};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{stream, Stage};

/// Shape of the planted-anomaly fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyConfig {
    pub n: usize,
    pub communities: usize,
    /// Feature dimensions per community block.
    pub block_dims: usize,
    /// Expected extra intra-community degree on top of the community ring.
    pub intra_degree: f64,
    /// Expected inter-community degree.
    pub inter_degree: f64,
    pub noise: f64,
    pub injection: InjectionConfig,
}

impl ToyConfig {
    pub fn new(n: usize) -> Self {
        ToyConfig {
            n,
            communities: 4,
            block_dims: 8,
            intra_degree: 2.0,
            inter_degree: 0.3,
            noise: 0.3,
            injection: InjectionConfig {
                clique_size: 5,
                n_cliques: 1,
                n_attr: 5,
                candidate_pool: 50,
                seed: 0,
            },
        }
    }
}

/// Community-structured background graph with Gaussian cluster features
/// (one 5-clique and 5 feature swaps injected), deterministic per seed.
pub fn make_toy_benchmark(n: usize, seed: u64) -> Result<(Graph, Manifest)> {
    ToyConfig::new(n).build(seed)
}

impl ToyConfig {
    pub fn build(&self, seed: u64) -> Result<(Graph, Manifest)> {
        if self.n < 20 {
            return Err(Error::Config(format!("toy benchmark needs n >= 20, got {}", self.n)));
        }
        if self.communities == 0 || self.n < 3 * self.communities {
            return Err(Error::Config("each community needs at least 3 nodes".into()));
        }
        let mut rng = stream(seed, Stage::Toy, 0, 0);
        let n = self.n;
        let c = self.communities;
        let community = |i: usize| i * c / n;
        let sizes: Vec<usize> = (0..c).map(|k| (0..n).filter(|&i| community(i) == k).count()).collect();

        let mut edges = Vec::new();
        // ring inside each community keeps every node connected to its own kind
        for k in 0..c {
            let members: Vec<usize> = (0..n).filter(|&i| community(i) == k).collect();
            for w in 0..members.len() {
                edges.push((members[w], members[(w + 1) % members.len()]));
            }
        }
        for u in 0..n {
            for v in (u + 1)..n {
                let (cu, cv) = (community(u), community(v));
                let p = if cu == cv {
                    self.intra_degree / (sizes[cu] - 1) as f64
                } else {
                    self.inter_degree / (n - sizes[cu]) as f64
                };
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }

        let d = c * self.block_dims;
        let features = Array2::from_shape_fn((n, d), |(i, j)| {
            let centre = if j / self.block_dims == community(i) { 2.0 } else { 0.0 };
            (centre + self.noise * Distribution::<f64>::sample(&StandardNormal, &mut rng)).max(0.0)
        });

        let background = Graph::new(edges, features, None)?;
        let mut rng = stream(seed, Stage::Inject, 0, 0);
        inject_anomalies(&background, &self.injection, &mut rng)
    }
}
