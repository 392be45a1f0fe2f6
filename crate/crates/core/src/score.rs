//! Inference-time anomaly scoring.
//!
//! Per round, every node gets freshly sampled views and in-batch negatives.
//! Its generative error is min-max scaled across the round's population and
//! its contrastive gap `s̃ − s` is mapped affinely from `[-1, 1]` to `[0, 1]`;
//! the two are weighted into a final score and averaged over rounds.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::ArrayView1;
use rand::seq::SliceRandom;

use crate::batch::{sample_batch, split_batches};
use crate::config::{GenScaling, RunConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::ModelParams;
use crate::rng::{stream, Stage};

/// `½(‖x̂¹ − x‖² + ‖x̂² − x‖²)`.
pub fn generative_raw(
    x: ArrayView1<'_, f64>,
    recon1: ArrayView1<'_, f64>,
    recon2: ArrayView1<'_, f64>,
) -> Result<f64> {
    if recon1.len() != x.len() || recon2.len() != x.len() {
        return Err(Error::Shape(format!(
            "feature vector of length {} vs reconstructions of {} and {}",
            x.len(),
            recon1.len(),
            recon2.len()
        )));
    }
    let sq = |r: ArrayView1<'_, f64>| r.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    Ok(0.5 * (sq(recon1) + sq(recon2)))
}

/// `½((s̃¹ − s¹) + (s̃² − s²))`, in `[-1, 1]`.
pub fn contrastive_raw(pos: [f64; 2], neg: [f64; 2]) -> Result<f64> {
    if let Some(v) = pos.iter().chain(neg.iter()).find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Metric(format!("discriminator score {v} outside [0, 1]")));
    }
    Ok(0.5 * ((neg[0] - pos[0]) + (neg[1] - pos[1])))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    /// Population min-max; a constant population maps to zeros.
    Gen,
    /// `x ↦ (x + 1) / 2`, clamped to `[0, 1]`.
    Con,
}

pub fn scale_scores(raw: &[f64], kind: ScoreKind) -> Vec<f64> {
    match kind {
        ScoreKind::Gen => {
            let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
            let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = max - min;
            if span > 0.0 {
                raw.iter().map(|&v| (v - min) / span).collect()
            } else {
                vec![0.0; raw.len()]
            }
        }
        ScoreKind::Con => raw.iter().map(|&v| ((v + 1.0) / 2.0).clamp(0.0, 1.0)).collect(),
    }
}

/// Raw per-node components from one evaluation round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundScores {
    pub raw_gen: Vec<f64>,
    pub raw_con: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub raw_gen: Vec<f64>,
    pub raw_con: Vec<f64>,
    pub scaled_gen: Vec<f64>,
    pub scaled_con: Vec<f64>,
    /// `alpha · scaled_con + beta · scaled_gen`.
    pub final_scores: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub rounds_used: usize,
}

impl ScoreTable {
    pub fn len(&self) -> usize {
        self.final_scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.final_scores.is_empty()
    }

    /// Node ids by descending final score (ties by id).
    pub fn ranking(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.len()).collect();
        ids.sort_by(|&a, &b| {
            self.final_scores[b]
                .total_cmp(&self.final_scores[a])
                .then(a.cmp(&b))
        });
        ids
    }

    /// `node_id<TAB>final<TAB>scaled_gen<TAB>scaled_con<TAB>raw_gen<TAB>raw_con`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{i}\t{}\t{}\t{}\t{}\t{}",
                self.final_scores[i], self.scaled_gen[i], self.scaled_con[i], self.raw_gen[i], self.raw_con[i]
            );
        }
        out
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

/// Final scores from a `scores.tsv`, indexed by node id.
pub fn read_final_scores(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut scores = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(Error::parse(path, lineno + 1, "expected 6 columns"));
        }
        let id: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno + 1, "bad node id"))?;
        if id != scores.len() {
            return Err(Error::parse(path, lineno + 1, "node ids must be sorted and dense"));
        }
        let v: f64 = cols[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno + 1, "bad score"))?;
        scores.push(v);
    }
    Ok(scores)
}

/// One evaluation round; `round` keys the random streams.
pub fn score_round(graph: &Graph, params: &ModelParams, cfg: &RunConfig, round: u64) -> Result<RoundScores> {
    let n = graph.n_nodes();
    if n < 2 {
        return Err(Error::Config("scoring needs a graph with at least 2 nodes".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut stream(cfg.seed, Stage::ScoreShuffle, round, 0));
    let mut raw_gen = vec![0.0; n];
    let mut raw_con = vec![0.0; n];
    for (b, batch) in split_batches(&order, cfg.batch_size, true).into_iter().enumerate() {
        let views = sample_batch(
            graph,
            cfg,
            batch,
            (Stage::ScoreView, Stage::ScoreNegative),
            round,
            b as u64,
        )?;
        let chunks = views.forward(graph, params)?;
        for (i, (_, out)) in chunks.iter().flatten().enumerate() {
            let t = views.targets[i];
            raw_gen[t] = generative_raw(graph.feature_row(t), out.recon[0].view(), out.recon[1].view())?;
            raw_con[t] = contrastive_raw(out.pos_scores(), out.neg_scores())?;
        }
    }
    Ok(RoundScores { raw_gen, raw_con })
}

/// Scores every node over `cfg.rounds` rounds.
pub fn score_all(graph: &Graph, params: &ModelParams, cfg: &RunConfig) -> Result<ScoreTable> {
    if cfg.rounds == 0 {
        return Err(Error::Config("rounds must be at least 1".into()));
    }
    let rounds: Vec<u64> = (0..cfg.rounds as u64).collect();
    score_rounds(graph, params, cfg, &rounds)
}

/// Scores over an explicit list of round keys.
pub fn score_rounds(
    graph: &Graph,
    params: &ModelParams,
    cfg: &RunConfig,
    rounds: &[u64],
) -> Result<ScoreTable> {
    cfg.validate()?;
    if rounds.is_empty() {
        return Err(Error::Config("rounds must be at least 1".into()));
    }
    if params.n_features() != graph.n_features() {
        return Err(Error::Shape(format!(
            "model expects D = {} but the graph has D = {}",
            params.n_features(),
            graph.n_features()
        )));
    }
    let per_round = rounds
        .iter()
        .map(|&r| score_round(graph, params, cfg, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_rounds(&per_round, cfg))
}

/// Scales and averages per-round raw components into a [`ScoreTable`].
pub fn combine_rounds(rounds: &[RoundScores], cfg: &RunConfig) -> ScoreTable {
    let n = rounds[0].raw_gen.len();
    let r = rounds.len() as f64;
    let (alpha, beta) = cfg.mode.scoring_weights(cfg.alpha, cfg.beta);
    let scaled = cfg.mode.scaled();

    let mut raw_gen = vec![0.0; n];
    let mut raw_con = vec![0.0; n];
    let mut scaled_gen = vec![0.0; n];
    let mut scaled_con = vec![0.0; n];
    for round in rounds {
        let sg = if scaled {
            scale_scores(&round.raw_gen, ScoreKind::Gen)
        } else {
            round.raw_gen.clone()
        };
        let sc = if scaled {
            scale_scores(&round.raw_con, ScoreKind::Con)
        } else {
            round.raw_con.clone()
        };
        for i in 0..n {
            raw_gen[i] += round.raw_gen[i] / r;
            raw_con[i] += round.raw_con[i] / r;
            scaled_gen[i] += sg[i] / r;
            scaled_con[i] += sc[i] / r;
        }
    }
    if scaled && cfg.gen_scaling == GenScaling::AfterAveraging {
        scaled_gen = scale_scores(&raw_gen, ScoreKind::Gen);
    }
    let final_scores = (0..n)
        .map(|i| alpha * scaled_con[i] + beta * scaled_gen[i])
        .collect();
    ScoreTable {
        raw_gen,
        raw_con,
        scaled_gen,
        scaled_con,
        final_scores,
        alpha,
        beta,
        rounds_used: rounds.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::make_toy_benchmark;
    use crate::config::Mode;
    use crate::train::init_params;
    use ndarray::array;

    fn cfg() -> RunConfig {
        RunConfig {
            d_hidden: 8,
            batch_size: 16,
            rounds: 3,
            ..RunConfig::default()
        }
    }

    #[test]
    fn generative_raw_cases() {
        let x = array![0.0, 0.0];
        assert_eq!(generative_raw(x.view(), x.view(), x.view()).unwrap(), 0.0);
        let r = array![1.0, 1.0];
        assert_eq!(generative_raw(x.view(), r.view(), r.view()).unwrap(), 2.0);
        assert!(generative_raw(x.view(), array![1.0].view(), r.view()).is_err());
    }

    #[test]
    fn contrastive_raw_cases() {
        assert_eq!(contrastive_raw([1.0, 1.0], [0.0, 0.0]).unwrap(), -1.0);
        assert_eq!(contrastive_raw([0.5, 0.5], [0.5, 0.5]).unwrap(), 0.0);
        let v = contrastive_raw([0.9, 0.6], [0.2, 0.7]).unwrap();
        assert!((v - 0.5 * ((0.2 - 0.9) + (0.7 - 0.6))).abs() < 1e-15);
        assert!(contrastive_raw([1.5, 0.5], [0.5, 0.5]).is_err());
    }

    #[test]
    fn scaler_cases() {
        assert_eq!(scale_scores(&[0.0, 2.0, 4.0], ScoreKind::Gen), vec![0.0, 0.5, 1.0]);
        assert_eq!(scale_scores(&[3.0, 3.0], ScoreKind::Gen), vec![0.0, 0.0]);
        assert_eq!(scale_scores(&[-1.0, 0.0, 1.0], ScoreKind::Con), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn repeated_round_matches_single_round() {
        let g = make_toy_benchmark(30, 4).unwrap().0;
        let p = init_params(&g, &cfg());
        let one = score_rounds(&g, &p, &cfg(), &[7]).unwrap();
        let two = score_rounds(&g, &p, &cfg(), &[7, 7]).unwrap();
        assert_eq!(one.final_scores, two.final_scores);
        assert_eq!(one.raw_gen, two.raw_gen);
        assert_eq!(two.rounds_used, 2);
    }

    #[test]
    fn table_decomposes_exactly() {
        let g = make_toy_benchmark(30, 4).unwrap().0;
        let p = init_params(&g, &cfg());
        let t = score_all(&g, &p, &cfg()).unwrap();
        for i in 0..t.len() {
            assert_eq!(t.final_scores[i], t.alpha * t.scaled_con[i] + t.beta * t.scaled_gen[i]);
            assert!((0.0..=1.0).contains(&t.scaled_gen[i]));
            assert!((0.0..=1.0).contains(&t.scaled_con[i]));
            assert!(t.raw_gen[i] >= 0.0 && (-1.0..=1.0).contains(&t.raw_con[i]));
        }
    }

    #[test]
    fn contrastive_only_scoring() {
        let g = make_toy_benchmark(30, 4).unwrap().0;
        let c = RunConfig { beta: 0.0, ..cfg() };
        let p = init_params(&g, &c);
        let t = score_all(&g, &p, &c).unwrap();
        assert_eq!(t.final_scores, t.scaled_con);

        let c = RunConfig { mode: Mode::GenOnly, ..cfg() };
        let t = score_all(&g, &p, &c).unwrap();
        for i in 0..t.len() {
            assert_eq!(t.final_scores[i], 0.6 * t.scaled_gen[i]);
        }
    }

    #[test]
    fn unscaled_mode_uses_raw_components() {
        let g = make_toy_benchmark(30, 4).unwrap().0;
        let c = RunConfig { mode: Mode::Unscaled, ..cfg() };
        let p = init_params(&g, &c);
        let t = score_all(&g, &p, &c).unwrap();
        assert_eq!(t.scaled_gen, t.raw_gen);
        assert_eq!(t.scaled_con, t.raw_con);
    }

    #[test]
    fn after_averaging_scaling_spans_unit_interval() {
        let g = make_toy_benchmark(30, 4).unwrap().0;
        let c = RunConfig { gen_scaling: GenScaling::AfterAveraging, ..cfg() };
        let p = init_params(&g, &c);
        let t = score_all(&g, &p, &c).unwrap();
        let max = t.scaled_gen.iter().copied().fold(f64::MIN, f64::max);
        let min = t.scaled_gen.iter().copied().fold(f64::MAX, f64::min);
        assert_eq!((min, max), (0.0, 1.0));
    }

    #[test]
    fn tsv_round_trip_of_final_scores() {
        let g = make_toy_benchmark(30, 4).unwrap().0;
        let p = init_params(&g, &cfg());
        let t = score_all(&g, &p, &cfg()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.tsv");
        t.write_tsv(&path).unwrap();
        assert_eq!(read_final_scores(&path).unwrap(), t.final_scores);
        assert_eq!(t.ranking().len(), t.len());
    }

    #[test]
    fn zero_rounds_rejected() {
        let g = make_toy_benchmark(30, 4).unwrap().0;
        let c = RunConfig { rounds: 0, ..cfg() };
        let p = init_params(&g, &cfg());
        assert!(score_all(&g, &p, &c).is_err());
    }
}
