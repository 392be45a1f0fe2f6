//! Benchmark protocol: synthetic anomaly injection and ROC/AUC evaluation.

mod inject;
mod metrics;
mod toy;

pub use inject::{inject_anomalies, InjectionConfig, Manifest};
pub use metrics::{roc_auc, RocCurve};
pub use toy::{make_toy_benchmark, ToyConfig};
