use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// ROC curve from `(0, 0)` to `(1, 1)`, one point per distinct score.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// Descending; the first entry is `+∞` for the origin.
    pub thresholds: Vec<f64>,
    pub fpr: Vec<f64>,
    pub tpr: Vec<f64>,
    pub auc: f64,
}

impl RocCurve {
    /// Trapezoidal area under the stored points.
    pub fn trapezoid_area(&self) -> f64 {
        self.fpr
            .windows(2)
            .zip(self.tpr.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[1] + y[0]) / 2.0)
            .sum()
    }

    /// `threshold<TAB>fpr<TAB>tpr` per point.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.thresholds.len() {
            let _ = writeln!(out, "{}\t{}\t{}", self.thresholds[i], self.fpr[i], self.tpr[i]);
        }
        out
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

/// Tie-aware AUC, `P(s⁺ > s⁻) + ½ P(s⁺ = s⁻)`, via midranks, plus the curve.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::Metric(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(l) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::Metric(format!("label {l} is not 0 or 1")));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Metric("scores must be finite".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Metric(
            "AUC needs at least one positive and one negative label".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let (p, q) = (n_pos as f64, n_neg as f64);
    let mut thresholds = vec![f64::INFINITY];
    let mut fpr = vec![0.0];
    let mut tpr = vec![0.0];
    // Sum over positives of (#negatives ranked strictly below + ½ #tied negatives).
    let mut wins = 0.0;
    let mut neg_above = 0usize;
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let mut j = i;
        let (mut grp_pos, mut grp_neg) = (0usize, 0usize);
        while j < order.len() && scores[order[j]] == s {
            if labels[order[j]] == 1 {
                grp_pos += 1;
            } else {
                grp_neg += 1;
            }
            j += 1;
        }
        let below = n_neg - neg_above - grp_neg;
        wins += grp_pos as f64 * (below as f64 + 0.5 * grp_neg as f64);
        neg_above += grp_neg;
        tp += grp_pos;
        fp += grp_neg;
        thresholds.push(s);
        fpr.push(fp as f64 / q);
        tpr.push(tp as f64 / p);
        i = j;
    }
    Ok(RocCurve {
        thresholds,
        fpr,
        tpr,
        auc: wins / (p * q),
    })
}
