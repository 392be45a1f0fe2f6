//! Contextual view sampling.
//!
//! A view of target node `t` is a small connected subgraph around `t`
//! collected by a random walk with restart. The target always occupies the
//! last row of the view and its feature row is zeroed, so anything computed
//! from the view only sees the target's context.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{normalize_adjacency, Graph, NormalizedAdj};

pub const DEFAULT_RESTART_PROB: f64 = 0.15;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    /// Maximum number of nodes in a view, target included.
    pub k: usize,
    pub restart_prob: f64,
    /// Walk-step budget; a view with fewer than `k` nodes is emitted when
    /// the walk runs out of steps.
    pub max_steps: usize,
    pub rng_seed: u64,
}

impl SamplerConfig {
    pub fn new(k: usize) -> Self {
        SamplerConfig {
            k,
            restart_prob: DEFAULT_RESTART_PROB,
            max_steps: 10 * k,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("view size k must be at least 1".into()));
        }
        if !(self.restart_prob > 0.0 && self.restart_prob < 1.0) {
            return Err(Error::Config(format!(
                "restart probability {} must lie in (0, 1)",
                self.restart_prob
            )));
        }
        if self.max_steps < self.k {
            return Err(Error::Config(format!(
                "max_steps {} must be at least k = {}",
                self.max_steps, self.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgraphView {
    pub target: usize,
    /// Parent-graph ids; `nodes.last() == Some(&target)`.
    pub nodes: Vec<usize>,
    pub adj_norm: NormalizedAdj,
    /// `K × D`, last row all zero.
    pub features: Array2<f64>,
}

impl SubgraphView {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Builds an anonymized view from an explicit node list whose last entry
    /// is the target.
    pub fn from_nodes(graph: &Graph, nodes: Vec<usize>) -> Result<Self> {
        let target = *nodes
            .last()
            .ok_or_else(|| Error::Sampling("a view needs at least one node".into()))?;
        let (mut features, adj) = graph.subgraph(&nodes)?;
        let last = nodes.len() - 1;
        features.row_mut(last).fill(0.0);
        Ok(SubgraphView {
            target,
            adj_norm: normalize_adjacency(&adj)?,
            nodes,
            features,
        })
    }
}

/// Random walk with restart from `target`, collecting the first `k` distinct
/// nodes visited (the target counts as the first).
pub fn rwr_nodes<R: Rng + ?Sized>(
    graph: &Graph,
    target: usize,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Vec<usize> {
    let mut visited = vec![target];
    if graph.degree(target) == 0 {
        return visited;
    }
    let mut current = target;
    let mut steps = 0;
    while visited.len() < cfg.k && steps < cfg.max_steps {
        steps += 1;
        if rng.gen::<f64>() < cfg.restart_prob {
            current = target;
            continue;
        }
        let nbrs = graph.neighbors(current);
        current = nbrs[rng.gen_range(0..nbrs.len())];
        if !visited.contains(&current) {
            visited.push(current);
        }
    }
    visited
}

pub fn sample_view<R: Rng + ?Sized>(
    graph: &Graph,
    target: usize,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<SubgraphView> {
    if target >= graph.n_nodes() {
        return Err(Error::Sampling(format!(
            "target {target} out of range 0..{}",
            graph.n_nodes()
        )));
    }
    let mut nodes = rwr_nodes(graph, target, cfg, rng);
    // target first in walk order, last in the view
    nodes.rotate_left(1);
    SubgraphView::from_nodes(graph, nodes)
}

pub fn sample_view_pair<R: Rng + ?Sized>(
    graph: &Graph,
    target: usize,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<(SubgraphView, SubgraphView)> {
    Ok((
        sample_view(graph, target, cfg, rng)?,
        sample_view(graph, target, cfg, rng)?,
    ))
}

/// In-batch negative partners. `partners[r][i]` is the batch position whose
/// views serve as the `r`-th negative for position `i`.
///
/// Positions are placed on a random cycle and partner `r` is the element
/// `r + 1` steps ahead, so each assignment is a fixed-point-free permutation,
/// each position's partner is uniform over the others, and the `ratio`
/// partners of one position are distinct.
pub fn negative_partners<R: Rng + ?Sized>(
    batch_len: usize,
    ratio: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    if batch_len < 2 {
        return Err(Error::Sampling(format!(
            "in-batch negatives need at least 2 targets, got {batch_len}"
        )));
    }
    if ratio == 0 || ratio >= batch_len {
        return Err(Error::Sampling(format!(
            "negative ratio {ratio} must lie in 1..{batch_len} for a batch of {batch_len}"
        )));
    }
    let mut cycle: Vec<usize> = (0..batch_len).collect();
    cycle.shuffle(rng);
    let mut position = vec![0; batch_len];
    for (p, &i) in cycle.iter().enumerate() {
        position[i] = p;
    }
    Ok((1..=ratio)
        .map(|shift| {
            (0..batch_len)
                .map(|i| cycle[(position[i] + shift) % batch_len])
                .collect()
        })
        .collect())
}

/// For every view pair in the batch, the view pair of a different target
/// (one negative per positive).
pub fn sample_negative_views<R: Rng + ?Sized>(
    batch_views: &[(SubgraphView, SubgraphView)],
    rng: &mut R,
) -> Result<Vec<(SubgraphView, SubgraphView)>> {
    let partners = negative_partners(batch_views.len(), 1, rng)?;
    Ok(partners[0].iter().map(|&j| batch_views[j].clone()).collect())
}
