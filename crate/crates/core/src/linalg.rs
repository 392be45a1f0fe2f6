//! Small dense kernels that skip zero entries of the left operand.
//! Bag-of-words features are mostly zeros, so these dominate the naive
//! dense products in practice.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

/// `x · w` for a mostly-zero `x` (rows × inner) and dense `w` (inner × cols).
pub(crate) fn sparse_left_dot(x: ArrayView2<'_, f64>, w: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut out = Array2::zeros((x.nrows(), w.ncols()));
    for (xrow, mut orow) in x.outer_iter().zip(out.outer_iter_mut()) {
        for (c, &v) in xrow.iter().enumerate() {
            if v != 0.0 {
                orow.scaled_add(v, &w.row(c));
            }
        }
    }
    out
}

/// `x · w` for a row vector `x`.
pub(crate) fn sparse_vec_dot(x: ArrayView1<'_, f64>, w: ArrayView2<'_, f64>) -> Array1<f64> {
    let mut out = Array1::zeros(w.ncols());
    for (c, &v) in x.iter().enumerate() {
        if v != 0.0 {
            out.scaled_add(v, &w.row(c));
        }
    }
    out
}

/// `acc += xᵀ · m`, skipping zero entries of `x`.
pub(crate) fn add_transpose_dot(acc: &mut Array2<f64>, x: ArrayView2<'_, f64>, m: ArrayView2<'_, f64>) {
    for (xrow, mrow) in x.outer_iter().zip(m.outer_iter()) {
        add_outer(acc, xrow, mrow, 1.0);
    }
}

/// `acc += scale · a ⊗ b`, skipping zero entries of `a`.
pub(crate) fn add_outer(acc: &mut Array2<f64>, a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>, scale: f64) {
    for (i, &ai) in a.iter().enumerate() {
        if ai != 0.0 {
            acc.index_axis_mut(Axis(0), i).scaled_add(scale * ai, &b);
        }
    }
}

pub(crate) fn relu_in_place<D: ndarray::Dimension>(a: &mut ndarray::Array<f64, D>) {
    a.mapv_inplace(|v| v.max(0.0));
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log σ(x)` without forming σ(x).
pub(crate) fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}
