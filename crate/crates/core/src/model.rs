//! The trainable model and its exact reverse-mode gradients.
//!
//! Shapes, with `K` view nodes, `D` input features and `D'` hidden units:
//!
//! ```text
//! H   = ReLU(Â X W_enc)          K × D'   view node embeddings
//! X̂   = ReLU(Â H W_dec)          K × D    reconstruction, target in the last row
//! h_t = ReLU(x_t W_enc)          D'       target embedding (original features)
//! g   = mean_rows(H)             D'       view embedding
//! s   = σ(h_t W_s gᵀ)            (0, 1)   discriminator score
//! ```
//!
//! Gradients are derived by hand for this fixed graph and checked against
//! central finite differences in the tests.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Zip};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::NormalizedAdj;
use crate::linalg::{
    add_outer, add_transpose_dot, relu_in_place, sigmoid, sparse_left_dot, sparse_vec_dot,
};
use crate::sampler::SubgraphView;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// `D × D'`
    pub w_enc: Array2<f64>,
    /// `D' × D`
    pub w_dec: Array2<f64>,
    /// `D' × D'`
    pub w_s: Array2<f64>,
}

fn glorot<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Array2<f64> {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_simple_fn((rows, cols), || rng.gen_range(-limit..limit))
}

impl ModelParams {
    pub fn zeros(d: usize, d_hidden: usize) -> Self {
        ModelParams {
            w_enc: Array2::zeros((d, d_hidden)),
            w_dec: Array2::zeros((d_hidden, d)),
            w_s: Array2::zeros((d_hidden, d_hidden)),
        }
    }

    /// Glorot-uniform initialization of all three matrices.
    pub fn glorot<R: Rng + ?Sized>(d: usize, d_hidden: usize, rng: &mut R) -> Self {
        ModelParams {
            w_enc: glorot(d, d_hidden, rng),
            w_dec: glorot(d_hidden, d, rng),
            w_s: glorot(d_hidden, d_hidden, rng),
        }
    }

    pub fn from_matrices(w_enc: Array2<f64>, w_dec: Array2<f64>, w_s: Array2<f64>) -> Result<Self> {
        let p = ModelParams { w_enc, w_dec, w_s };
        p.check_shapes()?;
        p.check_finite()?;
        Ok(p)
    }

    pub fn n_features(&self) -> usize {
        self.w_enc.nrows()
    }

    pub fn d_hidden(&self) -> usize {
        self.w_enc.ncols()
    }

    fn check_shapes(&self) -> Result<()> {
        let (d, h) = self.w_enc.dim();
        if self.w_dec.dim() != (h, d) || self.w_s.dim() != (h, h) {
            return Err(Error::Shape(format!(
                "w_enc {:?}, w_dec {:?}, w_s {:?} are inconsistent",
                self.w_enc.dim(),
                self.w_dec.dim(),
                self.w_s.dim()
            )));
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        for (name, m) in self.named() {
            if !m.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite(name.to_string()));
            }
        }
        Ok(())
    }

    pub fn named(&self) -> [(&'static str, &Array2<f64>); 3] {
        [("w_enc", &self.w_enc), ("w_dec", &self.w_dec), ("w_s", &self.w_s)]
    }

    pub fn named_mut(&mut self) -> [(&'static str, &mut Array2<f64>); 3] {
        [
            ("w_enc", &mut self.w_enc),
            ("w_dec", &mut self.w_dec),
            ("w_s", &mut self.w_s),
        ]
    }
}

/// Gradients with respect to each parameter matrix; same shapes as
/// [`ModelParams`] and additive across batch members.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub g_w_enc: Array2<f64>,
    pub g_w_dec: Array2<f64>,
    pub g_w_s: Array2<f64>,
}

impl Gradients {
    pub fn zeros_like(params: &ModelParams) -> Self {
        Gradients {
            g_w_enc: Array2::zeros(params.w_enc.raw_dim()),
            g_w_dec: Array2::zeros(params.w_dec.raw_dim()),
            g_w_s: Array2::zeros(params.w_s.raw_dim()),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        self.g_w_enc += &other.g_w_enc;
        self.g_w_dec += &other.g_w_dec;
        self.g_w_s += &other.g_w_s;
    }

    pub fn named(&self) -> [(&'static str, &Array2<f64>); 3] {
        [("w_enc", &self.g_w_enc), ("w_dec", &self.g_w_dec), ("w_s", &self.g_w_s)]
    }

    pub fn is_zero(&self) -> bool {
        self.named().iter().all(|(_, m)| m.iter().all(|&v| v == 0.0))
    }
}

fn check_view(params: &ModelParams, view: &SubgraphView) -> Result<()> {
    let k = view.features.nrows();
    if k == 0 {
        return Err(Error::Shape("empty view".into()));
    }
    if view.features.ncols() != params.n_features() {
        return Err(Error::Shape(format!(
            "view has {} features, model expects {}",
            view.features.ncols(),
            params.n_features()
        )));
    }
    if view.adj_norm.matrix().dim() != (k, k) {
        return Err(Error::Shape(format!(
            "view adjacency is {:?} for {k} nodes",
            view.adj_norm.matrix().dim()
        )));
    }
    Ok(())
}

/// Pre-activation `Â X W_enc`.
fn encode_pre(params: &ModelParams, adj: &Array2<f64>, x: ArrayView2<'_, f64>) -> Array2<f64> {
    let xw = sparse_left_dot(x, params.w_enc.view());
    adj.dot(&xw)
}

/// `ReLU(Â X W_enc)` for a view's (anonymized) features.
pub fn encode_view(params: &ModelParams, view: &SubgraphView) -> Result<Array2<f64>> {
    check_view(params, view)?;
    encode_features(params, &view.adj_norm, view.features.view())
}

/// [`encode_view`] for an arbitrary feature matrix over a normalized adjacency.
pub fn encode_features(
    params: &ModelParams,
    adj: &NormalizedAdj,
    features: ArrayView2<'_, f64>,
) -> Result<Array2<f64>> {
    if features.ncols() != params.n_features() || adj.size() != features.nrows() {
        return Err(Error::Shape(format!(
            "features {:?} with adjacency of size {} for a model with D = {}",
            features.dim(),
            adj.size(),
            params.n_features()
        )));
    }
    let mut h = encode_pre(params, adj.matrix(), features);
    relu_in_place(&mut h);
    Ok(h)
}

/// `ReLU(x_t W_enc)`, applied to the target's original features.
pub fn encode_target(params: &ModelParams, x_t: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    if x_t.len() != params.n_features() {
        return Err(Error::Shape(format!(
            "target has {} features, model expects {}",
            x_t.len(),
            params.n_features()
        )));
    }
    let mut h = sparse_vec_dot(x_t, params.w_enc.view());
    relu_in_place(&mut h);
    Ok(h)
}

/// `ReLU(Â H W_dec)`; the last row reconstructs the target.
pub fn decode_view(
    params: &ModelParams,
    embeddings: ArrayView2<'_, f64>,
    adj_norm: &NormalizedAdj,
) -> Result<Array2<f64>> {
    if embeddings.ncols() != params.d_hidden() || adj_norm.size() != embeddings.nrows() {
        return Err(Error::Shape(format!(
            "embeddings {:?} with adjacency of size {} for D' = {}",
            embeddings.dim(),
            adj_norm.size(),
            params.d_hidden()
        )));
    }
    let mut out = adj_norm.matrix().dot(&embeddings).dot(&params.w_dec);
    relu_in_place(&mut out);
    Ok(out)
}

/// Column-wise mean of the view's node embeddings.
pub fn readout(embeddings: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
    embeddings
        .mean_axis(ndarray::Axis(0))
        .ok_or_else(|| Error::Shape("readout of an empty embedding matrix".into()))
}

/// Bilinear logit `h W_s gᵀ`.
pub fn bilinear_logit(params: &ModelParams, h: ArrayView1<'_, f64>, g: ArrayView1<'_, f64>) -> f64 {
    h.dot(&params.w_s.dot(&g))
}

/// `σ(h W_s gᵀ)`.
pub fn discriminate(params: &ModelParams, h: ArrayView1<'_, f64>, g: ArrayView1<'_, f64>) -> f64 {
    sigmoid(bilinear_logit(params, h, g))
}

#[derive(Debug)]
struct ViewTrace<'a> {
    view: &'a SubgraphView,
    /// `Â X W_enc`
    pre: Array2<f64>,
    /// `ReLU(pre)`
    h: Array2<f64>,
    g: Array1<f64>,
}

impl<'a> ViewTrace<'a> {
    fn new(params: &ModelParams, view: &'a SubgraphView) -> Result<Self> {
        check_view(params, view)?;
        let pre = encode_pre(params, view.adj_norm.matrix(), view.features.view());
        let mut h = pre.clone();
        relu_in_place(&mut h);
        let g = readout(h.view())?;
        Ok(ViewTrace { view, pre, h, g })
    }

    fn last(&self) -> usize {
        self.h.nrows() - 1
    }
}

#[derive(Debug)]
struct DecodeTrace {
    /// `Â[last, :] H`
    q: Array1<f64>,
    /// `q W_dec`
    pre: Array1<f64>,
}

/// Intermediates of one [`forward_full`] call. Consumed by [`backward_full`].
#[derive(Debug)]
pub struct ForwardTrace<'a> {
    params: &'a ModelParams,
    x_t: ArrayView1<'a, f64>,
    target_pre: Array1<f64>,
    h_t: Array1<f64>,
    pos: [ViewTrace<'a>; 2],
    neg: Vec<[ViewTrace<'a>; 2]>,
    dec: [DecodeTrace; 2],
}

/// Per-target forward outputs. Scores are kept as logits; see
/// [`ForwardOutputs::pos_scores`] for probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOutputs {
    /// Target-row reconstructions `X̂^j[-1, :]` for views 1 and 2.
    pub recon: [Array1<f64>; 2],
    pub pos_logits: [f64; 2],
    /// One entry per negative partner.
    pub neg_logits: Vec<[f64; 2]>,
}

impl ForwardOutputs {
    pub fn pos_scores(&self) -> [f64; 2] {
        self.pos_logits.map(sigmoid)
    }

    /// Negative scores per view, averaged over negative partners.
    pub fn neg_scores(&self) -> [f64; 2] {
        let m = self.neg_logits.len() as f64;
        let mut out = [0.0; 2];
        for pair in &self.neg_logits {
            for j in 0..2 {
                out[j] += sigmoid(pair[j]) / m;
            }
        }
        out
    }
}

/// Upstream gradients of a scalar loss with respect to [`ForwardOutputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputGrads {
    pub d_recon: [Array1<f64>; 2],
    pub d_pos: [f64; 2],
    pub d_neg: Vec<[f64; 2]>,
}

impl OutputGrads {
    pub fn zeros(d: usize, n_neg: usize) -> Self {
        OutputGrads {
            d_recon: [Array1::zeros(d), Array1::zeros(d)],
            d_pos: [0.0; 2],
            d_neg: vec![[0.0; 2]; n_neg],
        }
    }
}

/// Forward pass for one target: both positive views, each negative pair,
/// the target embedding and both target reconstructions. Negatives share
/// every parameter with the positives.
pub fn forward_full<'a>(
    params: &'a ModelParams,
    x_t: ArrayView1<'a, f64>,
    view1: &'a SubgraphView,
    view2: &'a SubgraphView,
    negatives: &[(&'a SubgraphView, &'a SubgraphView)],
) -> Result<(ForwardTrace<'a>, ForwardOutputs)> {
    if x_t.len() != params.n_features() {
        return Err(Error::Shape(format!(
            "target has {} features, model expects {}",
            x_t.len(),
            params.n_features()
        )));
    }
    let target_pre = sparse_vec_dot(x_t, params.w_enc.view());
    let h_t = target_pre.mapv(|v| v.max(0.0));
    let w_s_t_h = params.w_s.t().dot(&h_t);

    let pos = [ViewTrace::new(params, view1)?, ViewTrace::new(params, view2)?];
    let neg = negatives
        .iter()
        .map(|(a, b)| Ok([ViewTrace::new(params, a)?, ViewTrace::new(params, b)?]))
        .collect::<Result<Vec<_>>>()?;

    let decode = |vt: &ViewTrace<'_>| {
        let row = vt.view.adj_norm.matrix().row(vt.last());
        let q = vt.h.t().dot(&row);
        let pre = q.dot(&params.w_dec);
        DecodeTrace { q, pre }
    };
    let dec = [decode(&pos[0]), decode(&pos[1])];

    let outputs = ForwardOutputs {
        recon: [dec[0].pre.mapv(|v| v.max(0.0)), dec[1].pre.mapv(|v| v.max(0.0))],
        pos_logits: [w_s_t_h.dot(&pos[0].g), w_s_t_h.dot(&pos[1].g)],
        neg_logits: neg
            .iter()
            .map(|pair| [w_s_t_h.dot(&pair[0].g), w_s_t_h.dot(&pair[1].g)])
            .collect(),
    };
    let trace = ForwardTrace {
        params,
        x_t,
        target_pre,
        h_t,
        pos,
        neg,
        dec,
    };
    Ok((trace, outputs))
}

/// Reverse pass of [`forward_full`]; returns parameter gradients.
pub fn backward_full(trace: ForwardTrace<'_>, upstream: &OutputGrads) -> Result<Gradients> {
    let mut grads = Gradients::zeros_like(trace.params);
    backward_into(trace, upstream, &mut grads)?;
    Ok(grads)
}

/// [`backward_full`] accumulating into an existing buffer.
pub fn backward_into(
    trace: ForwardTrace<'_>,
    upstream: &OutputGrads,
    grads: &mut Gradients,
) -> Result<()> {
    let params = trace.params;
    let d = params.n_features();
    if upstream.d_recon.iter().any(|r| r.len() != d) || upstream.d_neg.len() != trace.neg.len() {
        return Err(Error::Shape(format!(
            "upstream gradients do not match the trace ({} negatives, D = {d})",
            trace.neg.len()
        )));
    }
    let finite = upstream.d_recon.iter().all(|r| r.iter().all(|v| v.is_finite()))
        && upstream.d_pos.iter().chain(upstream.d_neg.iter().flatten()).all(|v| v.is_finite());
    if !finite {
        return Err(Error::NonFinite("upstream gradients".into()));
    }
    if grads.g_w_enc.dim() != params.w_enc.dim()
        || grads.g_w_dec.dim() != params.w_dec.dim()
        || grads.g_w_s.dim() != params.w_s.dim()
    {
        return Err(Error::Shape("gradient buffer does not match parameters".into()));
    }

    let h_t = &trace.h_t;
    let w_s_t_h = params.w_s.t().dot(h_t);
    let mut d_h_t = Array1::<f64>::zeros(params.d_hidden());

    // discriminator: logit = h_t · W_s g
    let mut disc = |vt: &ViewTrace<'_>, dl: f64| -> Array1<f64> {
        if dl == 0.0 {
            return Array1::zeros(vt.g.len());
        }
        add_outer(&mut grads.g_w_s, h_t.view(), vt.g.view(), dl);
        d_h_t.scaled_add(dl, &params.w_s.dot(&vt.g));
        &w_s_t_h * dl
    };

    let mut d_pos_g = Vec::with_capacity(2);
    for j in 0..2 {
        d_pos_g.push(disc(&trace.pos[j], upstream.d_pos[j]));
    }
    let mut d_neg_g = Vec::with_capacity(trace.neg.len());
    for (pair, dl) in trace.neg.iter().zip(&upstream.d_neg) {
        d_neg_g.push([disc(&pair[0], dl[0]), disc(&pair[1], dl[1])]);
    }

    for j in 0..2 {
        let vt = &trace.pos[j];
        let dec = &trace.dec[j];
        let mut d_h = Array2::<f64>::zeros(vt.h.raw_dim());

        // decoder: x̂ = ReLU(q W_dec), q = Â[last,:] H
        let mut d_pre = upstream.d_recon[j].clone();
        Zip::from(&mut d_pre).and(&dec.pre).for_each(|g, &p| {
            if p <= 0.0 {
                *g = 0.0;
            }
        });
        add_outer(&mut grads.g_w_dec, dec.q.view(), d_pre.view(), 1.0);
        let d_q = params.w_dec.dot(&d_pre);
        let row = vt.view.adj_norm.matrix().row(vt.last());
        for (k, &a) in row.iter().enumerate() {
            if a != 0.0 {
                d_h.row_mut(k).scaled_add(a, &d_q);
            }
        }

        add_readout_grad(&mut d_h, &d_pos_g[j]);
        encoder_backward(vt, d_h, &mut grads.g_w_enc);
    }
    for (pair, dg) in trace.neg.iter().zip(&d_neg_g) {
        for j in 0..2 {
            let mut d_h = Array2::<f64>::zeros(pair[j].h.raw_dim());
            add_readout_grad(&mut d_h, &dg[j]);
            encoder_backward(&pair[j], d_h, &mut grads.g_w_enc);
        }
    }

    // target encoder: h_t = ReLU(x_t W_enc)
    Zip::from(&mut d_h_t).and(&trace.target_pre).for_each(|g, &p| {
        if p <= 0.0 {
            *g = 0.0;
        }
    });
    add_outer(&mut grads.g_w_enc, trace.x_t, d_h_t.view(), 1.0);
    Ok(())
}

fn add_readout_grad(d_h: &mut Array2<f64>, d_g: &Array1<f64>) {
    let k = d_h.nrows() as f64;
    for mut row in d_h.rows_mut() {
        row.scaled_add(1.0 / k, d_g);
    }
}

/// `H = ReLU(Â X W_enc)`: `∂W_enc += Xᵀ Âᵀ (∂H ⊙ 1[pre > 0])`.
fn encoder_backward(vt: &ViewTrace<'_>, mut d_h: Array2<f64>, g_w_enc: &mut Array2<f64>) {
    Zip::from(&mut d_h).and(&vt.pre).for_each(|g, &p| {
        if p <= 0.0 {
            *g = 0.0;
        }
    });
    let d_xw = vt.view.adj_norm.matrix().t().dot(&d_h);
    add_transpose_dot(g_w_enc, vt.view.features.view(), d_xw.view());
}

/// Column slice helper used by tests and examples: the target row of a
/// full reconstruction.
pub fn target_row(recon: &Array2<f64>) -> ArrayView1<'_, f64> {
    recon.slice(s![recon.nrows() - 1, ..])
}
