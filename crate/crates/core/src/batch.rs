//! Per-batch view sampling and forward passes shared by training and scoring.

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::Result;
use crate::graph::Graph;
use crate::model::{forward_full, ForwardOutputs, ForwardTrace, ModelParams};
use crate::rng::{stream, Stage};
use crate::sampler::{negative_partners, sample_view_pair, SubgraphView};

/// Targets per parallel work unit. Fixed so that gradient sums are
/// reduced in the same order regardless of thread count.
pub(crate) const CHUNK: usize = 16;

pub(crate) struct BatchViews {
    pub targets: Vec<usize>,
    pub views: Vec<(SubgraphView, SubgraphView)>,
    /// `partners[r][i]`: batch position of the `r`-th negative of position `i`.
    pub partners: Vec<Vec<usize>>,
}

pub(crate) fn sample_batch(
    graph: &Graph,
    cfg: &RunConfig,
    targets: &[usize],
    stages: (Stage, Stage),
    step: u64,
    batch_idx: u64,
) -> Result<BatchViews> {
    let sampler = cfg.sampler();
    let views = targets
        .par_iter()
        .map(|&t| {
            let mut rng = stream(cfg.seed, stages.0, step, t as u64);
            sample_view_pair(graph, t, &sampler, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = stream(cfg.seed, stages.1, step, batch_idx);
    let partners = negative_partners(targets.len(), cfg.negative_ratio, &mut rng)?;
    Ok(BatchViews {
        targets: targets.to_vec(),
        views,
        partners,
    })
}

impl BatchViews {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn negatives(&self, i: usize) -> Vec<(&SubgraphView, &SubgraphView)> {
        self.partners
            .iter()
            .map(|level| {
                let (a, b) = &self.views[level[i]];
                (a, b)
            })
            .collect()
    }

    /// Forward passes for every target, grouped in [`CHUNK`]-sized runs.
    pub fn forward<'a>(
        &'a self,
        graph: &'a Graph,
        params: &'a ModelParams,
    ) -> Result<Vec<Vec<(ForwardTrace<'a>, ForwardOutputs)>>> {
        let positions: Vec<usize> = (0..self.len()).collect();
        positions
            .par_chunks(CHUNK)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|&i| {
                        let (v1, v2) = &self.views[i];
                        forward_full(
                            params,
                            graph.feature_row(self.targets[i]),
                            v1,
                            v2,
                            &self.negatives(i),
                        )
                    })
                    .collect()
            })
            .collect()
    }
}

/// Splits a permutation of nodes into batches of `batch_size`. A trailing
/// batch with a single node is merged into the previous one when `merge_singleton`
/// is set and dropped otherwise.
pub(crate) fn split_batches(order: &[usize], batch_size: usize, merge_singleton: bool) -> Vec<&[usize]> {
    let mut batches: Vec<&[usize]> = order.chunks(batch_size).collect();
    if batches.len() > 1 && batches.last().is_some_and(|b| b.len() < 2) {
        batches.pop();
        if merge_singleton {
            let start = (batches.len() - 1) * batch_size;
            *batches.last_mut().unwrap() = &order[start..];
        }
    }
    batches
}
