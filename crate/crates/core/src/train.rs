//! The training loop: shuffle, batch, sample views and in-batch negatives,
//! forward, weighted loss, backward, Adam.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::batch::{sample_batch, split_batches, BatchViews};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::loss::{combined_loss, contrastive_loss, generative_loss};
use crate::model::{backward_into, Gradients, ModelParams, OutputGrads};
use crate::optim::{adam_step, AdamState};
use crate::rng::{stream, Stage};

#[derive(Debug, Clone, PartialEq)]
pub struct BatchLossReport {
    pub size: usize,
    pub l_gen: f64,
    pub l_con: f64,
    /// `α · l_con + β · l_gen` with the mode's training weights.
    pub l_total: f64,
    pub gen_per_view: [f64; 2],
    pub con_per_view: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLoss {
    /// 1-based.
    pub epoch: usize,
    pub l_gen: f64,
    pub l_con: f64,
    pub l_total: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    pub epochs: Vec<EpochLoss>,
}

impl TrainingLog {
    /// `epoch<TAB>l_gen<TAB>l_con<TAB>l_total`, one line per epoch.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in &self.epochs {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", e.epoch, e.l_gen, e.l_con, e.l_total);
        }
        out
    }

    /// Appends the log lines to `path`.
    pub fn append_to(&self, path: impl AsRef<Path>) -> Result<()> {
        use std::io::Write;
        let path = path.as_ref();
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_tsv().as_bytes())
            .map_err(|e| Error::io(path, e))
    }
}

pub fn init_params(graph: &Graph, cfg: &RunConfig) -> ModelParams {
    let mut rng = stream(cfg.seed, Stage::Init, 0, 0);
    ModelParams::glorot(graph.n_features(), cfg.d_hidden, &mut rng)
}

/// Trains from a Glorot initialization derived from `cfg.seed`.
pub fn train(graph: &Graph, cfg: &RunConfig) -> Result<(ModelParams, TrainingLog)> {
    cfg.validate()?;
    let mut params = init_params(graph, cfg);
    let log = train_from(graph, cfg, &mut params)?;
    Ok((params, log))
}

/// Runs `cfg.epochs` epochs starting from `params`.
pub fn train_from(graph: &Graph, cfg: &RunConfig, params: &mut ModelParams) -> Result<TrainingLog> {
    cfg.validate()?;
    if graph.n_nodes() < 2 {
        return Err(Error::Config("training needs a graph with at least 2 nodes".into()));
    }
    if params.n_features() != graph.n_features() || params.d_hidden() != cfg.d_hidden {
        return Err(Error::Shape(format!(
            "parameters are {}x{} but the graph has D = {} and d_hidden = {}",
            params.n_features(),
            params.d_hidden(),
            graph.n_features(),
            cfg.d_hidden
        )));
    }
    let mut state = AdamState::new(params);
    let mut log = TrainingLog::default();
    for epoch in 1..=cfg.epochs {
        log.epochs.push(run_epoch(graph, cfg, params, &mut state, epoch)?);
    }
    Ok(log)
}

pub fn run_epoch(
    graph: &Graph,
    cfg: &RunConfig,
    params: &mut ModelParams,
    state: &mut AdamState,
    epoch: usize,
) -> Result<EpochLoss> {
    let mut order: Vec<usize> = (0..graph.n_nodes()).collect();
    order.shuffle(&mut stream(cfg.seed, Stage::Shuffle, epoch as u64, 0));

    let mut sums = [0.0; 3];
    let mut seen = 0usize;
    for (b, batch) in split_batches(&order, cfg.batch_size, false).into_iter().enumerate() {
        let (grads, report) = batch_gradients(graph, params, cfg, batch, epoch as u64, b as u64)?;
        adam_step(params, &grads, state, cfg.lr)?;
        let w = report.size as f64;
        sums[0] += w * report.l_gen;
        sums[1] += w * report.l_con;
        sums[2] += w * report.l_total;
        seen += report.size;
    }
    let n = seen as f64;
    Ok(EpochLoss {
        epoch,
        l_gen: sums[0] / n,
        l_con: sums[1] / n,
        l_total: sums[2] / n,
    })
}

/// Loss and summed gradients for one batch of target nodes.
pub fn batch_gradients(
    graph: &Graph,
    params: &ModelParams,
    cfg: &RunConfig,
    targets: &[usize],
    epoch: u64,
    batch_idx: u64,
) -> Result<(Gradients, BatchLossReport)> {
    let views = sample_batch(
        graph,
        cfg,
        targets,
        (Stage::TrainView, Stage::TrainNegative),
        epoch,
        batch_idx,
    )?;
    gradients_for(graph, params, cfg, &views)
}

fn gradients_for(
    graph: &Graph,
    params: &ModelParams,
    cfg: &RunConfig,
    views: &BatchViews,
) -> Result<(Gradients, BatchLossReport)> {
    let (alpha, beta) = cfg.mode.training_weights(cfg.alpha, cfg.beta);
    let chunks = views.forward(graph, params)?;
    let b = views.len();
    let d = graph.n_features();

    let mut recon1 = Array2::zeros((b, d));
    let mut recon2 = Array2::zeros((b, d));
    let mut targets = Array2::zeros((b, d));
    let mut pos = Vec::with_capacity(b);
    let mut neg = Vec::with_capacity(b);
    for (i, (_, out)) in chunks.iter().flatten().enumerate() {
        recon1.row_mut(i).assign(&out.recon[0]);
        recon2.row_mut(i).assign(&out.recon[1]);
        targets.row_mut(i).assign(&graph.feature_row(views.targets[i]));
        pos.push(out.pos_logits);
        neg.push(out.neg_logits.clone());
    }
    let gen = generative_loss(targets.view(), recon1.view(), recon2.view())?;
    let con = contrastive_loss(&pos, &neg)?;

    let per_chunk = chunks
        .into_par_iter()
        .enumerate()
        .map(|(c, chunk)| {
            let mut acc = Gradients::zeros_like(params);
            for (offset, (trace, _)) in chunk.into_iter().enumerate() {
                let i = c * crate::batch::CHUNK + offset;
                let upstream = OutputGrads {
                    d_recon: [
                        gen.grads[0].row(i).mapv(|g| beta * g),
                        gen.grads[1].row(i).mapv(|g| beta * g),
                    ],
                    d_pos: con.d_pos[i].map(|g| alpha * g),
                    d_neg: con.d_neg[i].iter().map(|p| p.map(|g| alpha * g)).collect(),
                };
                backward_into(trace, &upstream, &mut acc)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut grads = Gradients::zeros_like(params);
    for g in &per_chunk {
        grads.add_assign(g);
    }

    let report = BatchLossReport {
        size: b,
        l_gen: gen.loss,
        l_con: con.loss,
        l_total: combined_loss(gen.loss, con.loss, alpha, beta),
        gen_per_view: gen.per_view,
        con_per_view: con.per_view,
    };
    Ok((grads, report))
}
