use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct InjectionConfig {
    /// Nodes per planted clique.
    pub clique_size: usize,
    pub n_cliques: usize,
    /// Nodes whose features are swapped; must equal `n_cliques * clique_size`.
    pub n_attr: usize,
    /// Candidates drawn per attribute anomaly; the farthest one donates its features.
    pub candidate_pool: usize,
    pub seed: u64,
}

impl Default for InjectionConfig {
    fn default() -> Self {
        InjectionConfig {
            clique_size: 15,
            n_cliques: 5,
            n_attr: 75,
            candidate_pool: 50,
            seed: 0,
        }
    }
}

impl InjectionConfig {
    pub fn n_structural(&self) -> usize {
        self.clique_size * self.n_cliques
    }

    pub fn n_anomalies(&self) -> usize {
        self.n_structural() + self.n_attr
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_attr != self.n_structural() {
            return Err(Error::Config(format!(
                "attribute anomalies ({}) must equal clique_size x cliques ({})",
                self.n_attr,
                self.n_structural()
            )));
        }
        if self.n_cliques > 0 && self.clique_size < 2 {
            return Err(Error::Config("clique_size must be at least 2".into()));
        }
        if self.n_attr > 0 && self.candidate_pool == 0 {
            return Err(Error::Config("candidate_pool must be at least 1".into()));
        }
        Ok(())
    }
}

/// Record of every modification made by [`inject_anomalies`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    /// Members of each planted clique. These nodes keep their own features.
    pub cliques: Vec<Vec<usize>>,
    /// `(node, source)`: `node` now carries `source`'s original features.
    pub attributes: Vec<(usize, usize)>,
}

impl Manifest {
    /// `STRUCT<TAB>clique_idx<TAB>node` and `ATTR<TAB>node<TAB>source_node` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (c, members) in self.cliques.iter().enumerate() {
            for node in members {
                let _ = writeln!(out, "STRUCT\t{c}\t{node}");
            }
        }
        for (node, source) in &self.attributes {
            let _ = writeln!(out, "ATTR\t{node}\t{source}");
        }
        out
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    pub fn anomalies(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.cliques.iter().flatten().copied().collect();
        out.extend(self.attributes.iter().map(|&(n, _)| n));
        out.sort_unstable();
        out
    }
}

/// Plants `n_cliques` disjoint cliques and swaps the features of `n_attr`
/// further nodes with those of a distant node, labelling all of them 1.
pub fn inject_anomalies<R: Rng + ?Sized>(
    graph: &Graph,
    cfg: &InjectionConfig,
    rng: &mut R,
) -> Result<(Graph, Manifest)> {
    cfg.validate()?;
    let n = graph.n_nodes();
    if let Some(labels) = graph.labels() {
        if labels.iter().any(|&l| l != 0) {
            return Err(Error::Injection("graph already carries anomaly labels".into()));
        }
    }
    if n < cfg.n_anomalies() {
        return Err(Error::Injection(format!(
            "{} anomalies requested but the graph has only {n} nodes",
            cfg.n_anomalies()
        )));
    }

    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    let (structural, rest) = nodes.split_at(cfg.n_structural());
    let attr_nodes = &rest[..cfg.n_attr];

    let mut manifest = Manifest::default();
    let mut edges: Vec<(usize, usize)> = graph.edges().collect();
    for members in structural.chunks(cfg.clique_size.max(1)) {
        let mut members = members.to_vec();
        members.sort_unstable();
        for (a, &u) in members.iter().enumerate() {
            for &v in &members[a + 1..] {
                edges.push((u, v));
            }
        }
        manifest.cliques.push(members);
    }

    let original = graph.features();
    let mut features = original.to_owned();
    let pool = cfg.candidate_pool.min(n);
    for &node in attr_nodes {
        let x = original.row(node);
        let mut best = (node, f64::NEG_INFINITY);
        for cand in index::sample(rng, n, pool) {
            let dist: f64 = original
                .row(cand)
                .iter()
                .zip(x.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if dist > best.1 {
                best = (cand, dist);
            }
        }
        features.row_mut(node).assign(&original.row(best.0));
        manifest.attributes.push((node, best.0));
    }

    let mut labels = vec![0u8; n];
    for node in manifest.anomalies() {
        labels[node] = 1;
    }
    let injected = Graph::new(edges, features, Some(labels))?;
    Ok((injected, manifest))
}
