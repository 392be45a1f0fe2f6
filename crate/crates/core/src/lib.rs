//! Self-supervised graph anomaly detection.
//!
//! Nodes of an attributed graph are scored by how badly they agree with
//! their surrounding context. Each target node gets two small contextual
//! views sampled by random walk with restart; a one-layer GCN encoder is
//! shared by two self-supervised heads:
//!
//! - a generative head that reconstructs the (anonymized) target's
//!   features from its view, and
//! - a contrastive head that scores target-vs-own-view pairs against
//!   target-vs-other-view pairs with a bilinear discriminator.
//!
//! After training, both heads are turned into per-node anomaly scores,
//! averaged over many re-sampled evaluation rounds.
//!
//! The crate is organised bottom-up:
//!
//! | module      | contents                                               |
//! |-------------|--------------------------------------------------------|
//! | [`graph`]   | attributed graph storage, TSV IO, GCN normalization    |
//! | [`sampler`] | RWR view sampling, anonymization, in-batch negatives   |
//! | [`model`]   | encoder/decoder/readout/discriminator and gradients    |
//! | [`loss`]    | generative and contrastive losses                      |
//! | [`optim`]   | Adam                                                   |
//! | [`train`]   | the epoch/batch training loop                          |
//! | [`score`]   | multi-round anomaly scoring                            |
//! | [`bench`]   | anomaly injection, toy fixtures, ROC/AUC               |
//! | [`cli`]     | the `slgad` command line                               |
//!
//! See `examples/` for one runnable program per capability.

mod batch;
pub mod bench;
pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod error;
pub mod graph;
mod linalg;
pub mod loss;
pub mod model;
pub mod optim;
pub mod rng;
pub mod sampler;
pub mod score;
pub mod train;

pub use bench::{inject_anomalies, make_toy_benchmark, roc_auc, InjectionConfig, RocCurve};
pub use config::{Mode, RunConfig};
pub use error::{Error, Result};
pub use graph::{Graph, NormalizedAdj};
pub use model::ModelParams;
pub use sampler::{SamplerConfig, SubgraphView};
pub use score::{score_all, ScoreTable};
pub use train::{train, TrainingLog};
