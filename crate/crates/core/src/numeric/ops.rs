//! Elementwise activations, row softmax and the classification loss.

use serde::{Deserialize, Serialize};

use super::{DenseMatrix, Scalar};
use crate::error::{Error, Result};

pub fn relu<T: Scalar>(x: &DenseMatrix<T>) -> DenseMatrix<T> {
    x.map(|v| v.max(T::zero()))
}

/// Gradient of `relu` evaluated at pre-activation `pre`, applied to `upstream`.
pub fn relu_backward<T: Scalar>(pre: &DenseMatrix<T>, upstream: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    pre.zip_map(upstream, |p, g| if p > T::zero() { g } else { T::zero() })
}

pub fn leaky_relu<T: Scalar>(v: T, slope: T) -> T {
    if v > T::zero() {
        v
    } else {
        slope * v
    }
}

pub fn elu<T: Scalar>(v: T) -> T {
    if v > T::zero() {
        v
    } else {
        v.exp_m1()
    }
}

/// Nonlinearity applied after a layer's aggregation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    #[default]
    Relu,
    Elu,
}

impl Activation {
    pub fn apply<T: Scalar>(self, x: &DenseMatrix<T>) -> DenseMatrix<T> {
        match self {
            Activation::Identity => x.clone(),
            Activation::Relu => relu(x),
            Activation::Elu => x.map(elu),
        }
    }

    pub fn backward<T: Scalar>(self, pre: &DenseMatrix<T>, upstream: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        match self {
            Activation::Identity => Ok(upstream.clone()),
            Activation::Relu => relu_backward(pre, upstream),
            Activation::Elu => pre.zip_map(upstream, |p, g| if p > T::zero() { g } else { g * p.exp() }),
        }
    }
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows<T: Scalar>(x: &DenseMatrix<T>) -> DenseMatrix<T> {
    let mut out = x.clone();
    for r in 0..out.rows() {
        softmax_in_place(out.row_mut(r));
    }
    out
}

pub(crate) fn softmax_in_place<T: Scalar>(row: &mut [T]) {
    if row.is_empty() {
        return;
    }
    let max = row.iter().copied().fold(T::neg_infinity(), T::max);
    let mut total = T::zero();
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    for v in row.iter_mut() {
        *v /= total;
    }
}

/// Mean cross-entropy of `logits` against class indices, with its gradient
/// `(softmax - onehot) / rows`.
pub fn cross_entropy<T: Scalar>(logits: &DenseMatrix<T>, labels: &[usize]) -> Result<(T, DenseMatrix<T>)> {
    if labels.len() != logits.rows() {
        return Err(Error::Shape {
            op: "cross_entropy",
            left: logits.shape(),
            right: (labels.len(), 1),
        });
    }
    if logits.rows() == 0 {
        return Err(Error::Empty("logits"));
    }
    let classes = logits.cols();
    let n = T::of(logits.rows() as f64);
    let mut grad = softmax_rows(logits);
    let mut loss = T::zero();
    for (r, &label) in labels.iter().enumerate() {
        if label >= classes.min(2) {
            return Err(Error::LabelOutOfRange { row: r, label });
        }
        // log-softmax directly, so confident rows do not lose precision
        let row = logits.row(r);
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let lse = max + row.iter().map(|&v| (v - max).exp()).sum::<T>().ln();
        loss += lse - row[label];
        grad[(r, label)] -= T::one();
    }
    Ok((loss / n, grad.scale(T::one() / n)))
}
