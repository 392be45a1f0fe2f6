//! Self-supervised training losses.
//!
//! Both losses are batch means, so summing per-target gradients over a
//! batch gives the gradient of the batch loss.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg::{log_sigmoid, sigmoid};

/// Generative loss `½(L¹ + L²)` with `Lʲ = (1/B) Σᵢ ‖x̂ʲᵢ − xᵢ‖² / D`.
///
/// Also returns the per-view components with `∂loss/∂x̂ʲ` for each view.
pub fn generative_loss(
    targets: ArrayView2<'_, f64>,
    recon1: ArrayView2<'_, f64>,
    recon2: ArrayView2<'_, f64>,
) -> Result<GenerativeLoss> {
    if recon1.dim() != targets.dim() || recon2.dim() != targets.dim() {
        return Err(Error::Shape(format!(
            "targets {:?}, reconstructions {:?} and {:?}",
            targets.dim(),
            recon1.dim(),
            recon2.dim()
        )));
    }
    let (b, d) = targets.dim();
    if b == 0 || d == 0 {
        return Err(Error::Shape("empty generative batch".into()));
    }
    let norm = (b * d) as f64;
    let diff1 = &recon1 - &targets;
    let diff2 = &recon2 - &targets;
    let per_view = [
        diff1.iter().map(|v| v * v).sum::<f64>() / norm,
        diff2.iter().map(|v| v * v).sum::<f64>() / norm,
    ];
    // ∂/∂x̂ of ½ · (1/(B·D)) Σ (x̂ − x)² = (x̂ − x) / (B·D)
    Ok(GenerativeLoss {
        loss: 0.5 * (per_view[0] + per_view[1]),
        per_view,
        grads: [diff1 / norm, diff2 / norm],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerativeLoss {
    pub loss: f64,
    pub per_view: [f64; 2],
    pub grads: [Array2<f64>; 2],
}

/// Contrastive loss from discriminator logits.
///
/// `Lʲ = −(1/2B) Σᵢ (log σ(pᵢʲ) + log(1 − σ(nᵢʲ)))`, combined as `½(L¹ + L²)`.
/// With several negatives per target, `nᵢʲ`'s term is the mean over them.
/// `pos[i]` holds both views' positive logits for target `i`, `neg[i][r]`
/// the `r`-th negative pair.
pub fn contrastive_loss(pos: &[[f64; 2]], neg: &[Vec<[f64; 2]>]) -> Result<ContrastiveLoss> {
    let b = pos.len();
    if b == 0 || neg.len() != b {
        return Err(Error::Shape(format!(
            "{} positive and {} negative logit rows",
            b,
            neg.len()
        )));
    }
    let m = neg[0].len();
    if m == 0 || neg.iter().any(|row| row.len() != m) {
        return Err(Error::Shape("every target needs the same number of negatives".into()));
    }
    let all_finite = pos.iter().flatten().chain(neg.iter().flatten().flatten()).all(|v| v.is_finite());
    if !all_finite {
        return Err(Error::NonFinite("discriminator logits".into()));
    }

    let bf = b as f64;
    let mf = m as f64;
    let mut per_view = [0.0; 2];
    let mut d_pos = vec![[0.0; 2]; b];
    let mut d_neg = vec![vec![[0.0; 2]; m]; b];
    for i in 0..b {
        for j in 0..2 {
            let p = pos[i][j];
            per_view[j] -= log_sigmoid(p) / (2.0 * bf);
            // ½ · −(1/2B) · (1 − σ(p))
            d_pos[i][j] = -0.5 * (1.0 - sigmoid(p)) / (2.0 * bf);
            for r in 0..m {
                let n = neg[i][r][j];
                // log(1 − σ(n)) = log σ(−n)
                per_view[j] -= log_sigmoid(-n) / (2.0 * bf * mf);
                d_neg[i][r][j] = 0.5 * sigmoid(n) / (2.0 * bf * mf);
            }
        }
    }
    Ok(ContrastiveLoss {
        loss: 0.5 * (per_view[0] + per_view[1]),
        per_view,
        d_pos,
        d_neg,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastiveLoss {
    pub loss: f64,
    pub per_view: [f64; 2],
    pub d_pos: Vec<[f64; 2]>,
    pub d_neg: Vec<Vec<[f64; 2]>>,
}

/// `α · l_con + β · l_gen`.
pub fn combined_loss(l_gen: f64, l_con: f64, alpha: f64, beta: f64) -> f64 {
    alpha * l_con + beta * l_gen
}
