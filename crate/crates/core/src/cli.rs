//! The `slgad` command line.
//!
//! A run directory holds everything one experiment produces:
//!
//! ```text
//! <run>/graph/        edges.tsv, features.tsv, labels.tsv
//! <run>/manifest.tsv  injected anomalies (inject, toy)
//! <run>/checkpoint    trained parameters
//! <run>/loss.log      epoch<TAB>l_gen<TAB>l_con<TAB>l_total
//! <run>/scores.tsv    per-node anomaly scores
//! <run>/roc.tsv       threshold<TAB>fpr<TAB>tpr
//! <run>/config.resolved
//! ```
//!
//! Settings resolve in order: preset, `--config` file (`key = value`
//! lines), then individual flags. Exit status is 0 on success, 2 for usage
//! or configuration errors, 3 for data errors and 4 for numeric failures.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{inject_anomalies, roc_auc, InjectionConfig, Manifest, RocCurve, ToyConfig};
use crate::checkpoint::Checkpoint;
use crate::config::{GenScaling, Mode, RunConfig, BETA_SWEEP};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{stream, Stage};
use crate::score::{read_final_scores, score_all, ScoreTable};
use crate::train::{init_params, train_from, TrainingLog};

#[derive(Debug, Parser)]
#[command(name = "slgad", version, about = "Self-supervised graph anomaly detection")]
pub struct Cli {
    /// Cap on worker threads used for training and scoring.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inject structural and attribute anomalies into a dataset.
    Inject {
        /// Dataset directory (edges.tsv, features.tsv).
        #[arg(long = "in")]
        input: PathBuf,
        /// Run directory to create.
        #[arg(long)]
        out: PathBuf,
        /// Seed for choosing anomalous nodes.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        injection: InjectArgs,
    },
    /// Train on `<run>/graph` and write `checkpoint` and `loss.log`.
    Train {
        #[arg(long)]
        run: PathBuf,
        #[command(flatten)]
        config: RunArgs,
    },
    /// Score every node with the trained checkpoint and write `scores.tsv`.
    Score {
        #[arg(long)]
        run: PathBuf,
        #[command(flatten)]
        config: RunArgs,
    },
    /// Print the ROC AUC of `scores.tsv` against the labels and write `roc.tsv`.
    Eval {
        #[arg(long)]
        run: PathBuf,
    },
    /// The whole pipeline in one go.
    RunAll {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Use the dataset as is (it must already carry labels).
        #[arg(long)]
        no_inject: bool,
        /// Train and score once per β in {0.2, 0.4, 0.6, 0.8, 1}, each in `<out>/beta-<β>`.
        #[arg(long)]
        beta_sweep: bool,
        /// Seed for choosing anomalous nodes (`--seed` is the training seed here).
        #[arg(long, default_value_t = 0)]
        inject_seed: u64,
        #[command(flatten)]
        injection: InjectArgs,
        #[command(flatten)]
        config: RunArgs,
    },
    /// Generate the planted-anomaly toy graph and run the pipeline on it.
    Toy {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        fixture_seed: u64,
        /// Only write the fixture.
        #[arg(long)]
        no_run: bool,
        #[command(flatten)]
        config: RunArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct InjectArgs {
    #[arg(long, default_value_t = 15)]
    pub clique_size: usize,
    #[arg(long, default_value_t = 5)]
    pub cliques: usize,
    #[arg(long, default_value_t = 75)]
    pub attr: usize,
    /// Candidates examined per attribute anomaly.
    #[arg(long, default_value_t = 50)]
    pub candidates: usize,
}

impl InjectArgs {
    pub fn to_config(&self, seed: u64) -> InjectionConfig {
        InjectionConfig {
            clique_size: self.clique_size,
            n_cliques: self.cliques,
            n_attr: self.attr,
            candidate_pool: self.candidates,
            seed,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// cora | citeseer | pubmed | acm | blogcatalog | flickr | toy
    #[arg(long)]
    pub preset: Option<String>,
    /// Flat `key = value` file with RunConfig keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub d_hidden: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub negative_ratio: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restart_prob: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// full | gen-only | con-only | unweighted | unscaled
    #[arg(long)]
    pub mode: Option<String>,
    /// per-round | after-averaging
    #[arg(long)]
    pub gen_scaling: Option<String>,
}

impl RunArgs {
    /// Preset (or `base`), then the config file, then flags.
    pub fn resolve(&self, base: RunConfig) -> Result<RunConfig> {
        let mut cfg = match &self.preset {
            Some(name) => RunConfig::preset(name)?,
            None => base,
        };
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            )*};
        }
        set!(k, d_hidden, alpha, beta, lr, epochs, batch_size, rounds, negative_ratio, seed, restart_prob);
        if let Some(v) = self.max_steps {
            cfg.max_steps = Some(v);
        }
        if let Some(m) = &self.mode {
            cfg.mode = m.parse::<Mode>()?;
        }
        if let Some(s) = &self.gen_scaling {
            cfg.gen_scaling = s.parse::<GenScaling>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Paths inside a run directory. `graph` may be shared between runs.
#[derive(Debug, Clone)]
pub struct RunDir {
    pub root: PathBuf,
    pub graph: PathBuf,
}

impl RunDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        let root = root.into();
        RunDir {
            graph: root.join("graph"),
            root,
        }
    }

    pub fn checkpoint(&self) -> PathBuf {
        self.root.join("checkpoint")
    }

    pub fn loss_log(&self) -> PathBuf {
        self.root.join("loss.log")
    }

    pub fn scores(&self) -> PathBuf {
        self.root.join("scores.tsv")
    }

    pub fn roc(&self) -> PathBuf {
        self.root.join("roc.tsv")
    }

    pub fn config(&self) -> PathBuf {
        self.root.join("config.resolved")
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.tsv")
    }

    fn create(&self) -> Result<()> {
        fs::create_dir_all(&self.root).map_err(|e| Error::io(&self.root, e))
    }

    fn require_graph(&self) -> Result<Graph> {
        if !self.graph.is_dir() {
            return Err(Error::Config(format!(
                "{} does not contain a graph/ directory",
                self.root.display()
            )));
        }
        Graph::load(&self.graph)
    }

    fn write_config(&self, cfg: &RunConfig) -> Result<()> {
        let path = self.config();
        fs::write(&path, cfg.to_text()).map_err(|e| Error::io(&path, e))
    }

    /// The last resolved config, or the defaults.
    pub fn stored_config(&self) -> Result<RunConfig> {
        let path = self.config();
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            RunConfig::from_text(&text)
        } else {
            Ok(RunConfig::default())
        }
    }
}

pub fn inject(dataset: &Path, run: &RunDir, cfg: &InjectionConfig) -> Result<(Graph, Manifest)> {
    if !dataset.is_dir() {
        return Err(Error::Config(format!(
            "dataset directory {} not found",
            dataset.display()
        )));
    }
    cfg.validate()?;
    let graph = Graph::load(dataset)?;
    let mut rng = stream(cfg.seed, Stage::Inject, 0, 0);
    let (injected, manifest) = inject_anomalies(&graph, cfg, &mut rng)?;
    run.create()?;
    injected.save(&run.graph)?;
    manifest.write_tsv(run.manifest())?;
    Ok((injected, manifest))
}

pub fn train(run: &RunDir, cfg: &RunConfig) -> Result<TrainingLog> {
    cfg.validate()?;
    let graph = run.require_graph()?;
    run.create()?;
    run.write_config(cfg)?;
    let mut params = init_params(&graph, cfg);
    let log = train_from(&graph, cfg, &mut params)?;
    Checkpoint {
        params,
        config_hash: cfg.hash(),
    }
    .save(run.checkpoint())?;
    log.append_to(run.loss_log())?;
    Ok(log)
}

pub fn score(run: &RunDir, cfg: &RunConfig) -> Result<ScoreTable> {
    cfg.validate()?;
    let graph = run.require_graph()?;
    if !run.checkpoint().exists() {
        return Err(Error::Config(format!(
            "{} has no checkpoint; run `train` first",
            run.root.display()
        )));
    }
    let ck = Checkpoint::load(run.checkpoint())?;
    let table = score_all(&graph, &ck.params, cfg)?;
    run.write_config(cfg)?;
    table.write_tsv(run.scores())?;
    Ok(table)
}

pub fn eval(run: &RunDir) -> Result<RocCurve> {
    let scores = read_final_scores(run.scores())?;
    let graph = run.require_graph()?;
    let labels = graph
        .labels()
        .ok_or_else(|| Error::Metric(format!("{} has no labels.tsv", run.graph.display())))?;
    let curve = roc_auc(&scores, labels)?;
    curve.write_tsv(run.roc())?;
    Ok(curve)
}

fn train_score_eval(run: &RunDir, cfg: &RunConfig) -> Result<f64> {
    train(run, cfg)?;
    score(run, cfg)?;
    Ok(eval(run)?.auc)
}

/// Parses `args` (program name first) and runs the command; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Inject {
            input,
            out,
            seed,
            injection,
        } => {
            let (g, m) = inject(&input, &RunDir::new(out), &injection.to_config(seed))?;
            println!(
                "injected {} anomalies ({} in {} cliques, {} attribute) into {} nodes",
                m.anomalies().len(),
                m.cliques.iter().map(Vec::len).sum::<usize>(),
                m.cliques.len(),
                m.attributes.len(),
                g.n_nodes()
            );
        }
        Command::Train { run, config } => {
            let cfg = config.resolve(RunConfig::default())?;
            let log = train(&RunDir::new(run), &cfg)?;
            if let Some(last) = log.epochs.last() {
                println!(
                    "epoch {}: l_gen {:.6} l_con {:.6} l_total {:.6}",
                    last.epoch, last.l_gen, last.l_con, last.l_total
                );
            }
        }
        Command::Score { run, config } => {
            let dir = RunDir::new(run);
            let cfg = config.resolve(dir.stored_config()?)?;
            let table = score(&dir, &cfg)?;
            println!("scored {} nodes over {} rounds", table.len(), table.rounds_used);
        }
        Command::Eval { run } => {
            let curve = eval(&RunDir::new(run))?;
            println!("AUC {:.4}", curve.auc);
        }
        Command::RunAll {
            input,
            out,
            no_inject,
            beta_sweep,
            inject_seed,
            injection,
            config,
        } => {
            let cfg = config.resolve(RunConfig::default())?;
            let root = RunDir::new(&out);
            if no_inject {
                if !input.is_dir() {
                    return Err(Error::Config(format!(
                        "dataset directory {} not found",
                        input.display()
                    )));
                }
                Graph::load(&input)?.save(&root.graph)?;
            } else {
                inject(&input, &root, &injection.to_config(inject_seed))?;
            }
            if beta_sweep {
                let mut best = (f64::NAN, f64::NEG_INFINITY);
                for beta in BETA_SWEEP {
                    let sub = RunDir {
                        root: out.join(format!("beta-{beta}")),
                        graph: root.graph.clone(),
                    };
                    let auc = train_score_eval(&sub, &RunConfig { beta, ..cfg.clone() })?;
                    println!("beta {beta}\tAUC {auc:.4}");
                    if auc > best.1 {
                        best = (beta, auc);
                    }
                }
                println!("best beta {}\tAUC {:.4}", best.0, best.1);
            } else {
                println!("AUC {:.4}", train_score_eval(&root, &cfg)?);
            }
        }
        Command::Toy {
            out,
            n,
            fixture_seed,
            no_run,
            config,
        } => {
            let cfg = config.resolve(RunConfig::preset("toy")?)?;
            let dir = RunDir::new(&out);
            let (graph, manifest) = ToyConfig::new(n).build(fixture_seed)?;
            dir.create()?;
            graph.save(&dir.graph)?;
            manifest.write_tsv(dir.manifest())?;
            println!(
                "toy graph: {} nodes, {} edges, {} anomalies",
                graph.n_nodes(),
                graph.n_edges(),
                manifest.anomalies().len()
            );
            if !no_run {
                println!("AUC {:.4}", train_score_eval(&dir, &cfg)?);
            }
        }
    }
    Ok(())
}
