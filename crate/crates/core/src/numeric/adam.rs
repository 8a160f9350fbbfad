//! Bias-corrected Adam.

use super::{DenseMatrix, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    pub first_moment: Vec<DenseMatrix<T>>,
    pub second_moment: Vec<DenseMatrix<T>>,
    pub step_count: u64,
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
}

impl<T: Scalar> AdamState<T> {
    /// Zero moments for parameters of the given shapes, default betas.
    pub fn new(shapes: &[(usize, usize)], lr: T) -> Self {
        Self {
            first_moment: shapes.iter().map(|&(r, c)| DenseMatrix::zeros(r, c)).collect(),
            second_moment: shapes.iter().map(|&(r, c)| DenseMatrix::zeros(r, c)).collect(),
            step_count: 0,
            lr,
            beta1: T::of(0.9),
            beta2: T::of(0.999),
            epsilon: T::of(1e-8),
        }
    }

    pub fn for_params(params: &[&mut DenseMatrix<T>], lr: T) -> Self {
        let shapes: Vec<_> = params.iter().map(|p| p.shape()).collect();
        Self::new(&shapes, lr)
    }
}

/// One Adam update of `params` in place using `grads`.
pub fn adam_step<T: Scalar>(
    params: &mut [&mut DenseMatrix<T>],
    grads: &[DenseMatrix<T>],
    state: &mut AdamState<T>,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.first_moment.len() {
        return Err(Error::InvalidArgument(format!(
            "adam_step: {} params, {} grads, {} moment slots",
            params.len(),
            grads.len(),
            state.first_moment.len()
        )));
    }
    for (i, (p, g)) in params.iter().zip(grads).enumerate() {
        for other in [g.shape(), state.first_moment[i].shape(), state.second_moment[i].shape()] {
            if p.shape() != other {
                return Err(Error::Shape {
                    op: "adam_step",
                    left: p.shape(),
                    right: other,
                });
            }
        }
    }

    state.step_count += 1;
    let t = state.step_count as i32;
    let (b1, b2) = (state.beta1, state.beta2);
    let one = T::one();
    let correction1 = one - b1.powi(t);
    let correction2 = one - b2.powi(t);

    for ((p, g), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.first_moment.iter_mut().zip(state.second_moment.iter_mut()))
    {
        let p = p.as_mut_slice();
        let (m, v) = (m.as_mut_slice(), v.as_mut_slice());
        for (k, &gk) in g.as_slice().iter().enumerate() {
            m[k] = b1 * m[k] + (one - b1) * gk;
            v[k] = b2 * v[k] + (one - b2) * gk * gk;
            let m_hat = m[k] / correction1;
            let v_hat = v[k] / correction2;
            let delta = state.lr * m_hat / (v_hat.sqrt() + state.epsilon);
            if delta != T::zero() {
                p[k] -= delta;
            }
        }
    }
    Ok(())
}
