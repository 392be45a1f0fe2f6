//! Adam with bias correction.

use ndarray::{Array2, Zip};

use crate::error::{Error, Result};
use crate::model::{Gradients, ModelParams};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    /// First and second moments, ordered `w_enc`, `w_dec`, `w_s`.
    pub first: [Array2<f64>; 3],
    pub second: [Array2<f64>; 3],
    pub step: u64,
}

impl AdamState {
    pub fn new(params: &ModelParams) -> Self {
        let zeros = |m: &Array2<f64>| Array2::zeros(m.raw_dim());
        AdamState {
            first: [zeros(&params.w_enc), zeros(&params.w_dec), zeros(&params.w_s)],
            second: [zeros(&params.w_enc), zeros(&params.w_dec), zeros(&params.w_s)],
            step: 0,
        }
    }
}

pub fn adam_step(
    params: &mut ModelParams,
    grads: &Gradients,
    state: &mut AdamState,
    lr: f64,
) -> Result<()> {
    for (name, g) in grads.named() {
        if !g.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!("gradient of {name}")));
        }
    }
    for ((name, p), (_, g)) in params.named().iter().zip(grads.named().iter()) {
        if p.dim() != g.dim() {
            return Err(Error::Shape(format!(
                "{name} is {:?} but its gradient is {:?}",
                p.dim(),
                g.dim()
            )));
        }
    }

    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - BETA1.powi(t);
    let c2 = 1.0 - BETA2.powi(t);
    let grads = grads.named();
    for (i, (_, p)) in params.named_mut().into_iter().enumerate() {
        Zip::from(p)
            .and(grads[i].1)
            .and(&mut state.first[i])
            .and(&mut state.second[i])
            .for_each(|w, &g, m, v| {
                *m = BETA1 * *m + (1.0 - BETA1) * g;
                *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *w -= lr * m_hat / (v_hat.sqrt() + EPSILON);
            });
    }
    Ok(())
}
