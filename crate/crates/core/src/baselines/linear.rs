//! L2-regularized logistic regression and linear SVM on sparse rows.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{check_xy, dot, Classifier, DocMatrix};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub l2: f64,
    /// Gradient steps for logistic regression, passes over the data for the SVM.
    pub iters: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for LinearParams {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            iters: 500,
            lr: 0.1,
            seed: 42,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinearKind {
    Logistic,
    Svm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: LinearKind,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn decision(&self, row: &[(usize, f64)]) -> f64 {
        dot(row, &self.weights) + self.bias
    }
}

impl Classifier for LinearModel {
    /// Logistic: `σ(w·x+b) > 0.5`; SVM: `w·x+b > 0`. Both reduce to a positive margin.
    fn predict_row(&self, row: &[(usize, f64)]) -> usize {
        usize::from(self.decision(row) > 0.0)
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn require_both_classes(y: &[usize]) -> Result<()> {
    if y.iter().all(|&c| c == y[0]) {
        return Err(Error::InvalidArgument("training labels contain a single class".into()));
    }
    Ok(())
}

/// Full-batch gradient descent on mean log-loss plus `l2/2·|w|²`, from zero.
pub fn train_logreg(x: &DocMatrix, y: &[usize], p: &LinearParams) -> Result<LinearModel> {
    check_xy(x, y)?;
    require_both_classes(y)?;
    let n = y.len() as f64;
    let mut w = vec![0.0; x.n_cols];
    let mut b = 0.0;
    let mut gw = vec![0.0; x.n_cols];
    for _ in 0..p.iters {
        gw.iter_mut().zip(&w).for_each(|(g, wi)| *g = p.l2 * wi);
        let mut gb = 0.0;
        for (row, &yi) in x.rows.iter().zip(y) {
            let r = (sigmoid(dot(row, &w) + b) - yi as f64) / n;
            for &(c, v) in row {
                gw[c] += r * v;
            }
            gb += r;
        }
        w.iter_mut().zip(&gw).for_each(|(wi, g)| *wi -= p.lr * g);
        b -= p.lr * gb;
    }
    if !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("logistic regression weights".into()));
    }
    Ok(LinearModel {
        kind: LinearKind::Logistic,
        weights: w,
        bias: b,
    })
}

/// `l2/2·|w|² + mean hinge`, the objective the SVM minimizes.
pub fn svm_objective(m: &LinearModel, x: &DocMatrix, y: &[usize], l2: f64) -> f64 {
    let hinge: f64 = x
        .rows
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let s = if yi == 1 { 1.0 } else { -1.0 };
            (1.0 - s * m.decision(row)).max(0.0)
        })
        .sum::<f64>()
        / y.len() as f64;
    0.5 * l2 * m.weights.iter().map(|w| w * w).sum::<f64>() + hinge
}

pub fn train_svm(x: &DocMatrix, y: &[usize], p: &LinearParams) -> Result<LinearModel> {
    train_svm_traced(x, y, p).map(|(m, _)| m)
}

/// Seeded-shuffle SGD on the hinge loss with step `lr / (1 + lr·l2·t)`.
/// Also returns the objective after every pass.
pub fn train_svm_traced(x: &DocMatrix, y: &[usize], p: &LinearParams) -> Result<(LinearModel, Vec<f64>)> {
    check_xy(x, y)?;
    require_both_classes(y)?;
    // w = scale · v keeps the shrink step O(1) on sparse rows
    let mut v = vec![0.0; x.n_cols];
    let mut scale = 1.0;
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..y.len()).collect();
    let mut rng = seed::rng_for(p.seed, "svm");
    let mut trace = Vec::with_capacity(p.iters);
    let mut t = 0usize;
    for _ in 0..p.iters {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = p.lr / (1.0 + p.lr * p.l2 * t as f64);
            t += 1;
            let s = if y[i] == 1 { 1.0 } else { -1.0 };
            let margin = s * (scale * dot(&x.rows[i], &v) + b);
            scale *= 1.0 - eta * p.l2;
            if margin < 1.0 {
                for &(c, val) in &x.rows[i] {
                    v[c] += eta * s * val / scale;
                }
                b += eta * s;
            }
            if scale < 1e-9 {
                v.iter_mut().for_each(|vi| *vi *= scale);
                scale = 1.0;
            }
        }
        let m = LinearModel {
            kind: LinearKind::Svm,
            weights: v.iter().map(|vi| vi * scale).collect(),
            bias: b,
        };
        trace.push(svm_objective(&m, x, y, p.l2));
    }
    let weights: Vec<f64> = v.iter().map(|vi| vi * scale).collect();
    if !b.is_finite() || weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite("svm weights".into()));
    }
    Ok((
        LinearModel {
            kind: LinearKind::Svm,
            weights,
            bias: b,
        },
        trace,
    ))
}
