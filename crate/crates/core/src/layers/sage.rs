//! GraphSAGE: `h'_i = ReLU(W · [h_i ‖ AGG({h_j : j∈N(i)})])`.
//!
//! `Mean` uses the elementwise neighbor mean. `MaxPool` first maps each
//! neighbor through `ReLU(W_pool h_j + b_pool)` and takes the elementwise max.
//! The neighborhood should not contain self-loops; the node's own features
//! enter through the concatenation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::neighborhood::{mean_aggregate, mean_aggregate_backward};
use super::{bias_grad, check_input, glorot, with_bias, GraphLayer, Neighborhood};
use crate::error::{Error, Result};
use crate::numeric::{relu, relu_backward, DenseMatrix, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SageAggregator {
    #[default]
    Mean,
    MaxPool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SageParams<T> {
    /// `2·in x out`; the top half multiplies the node itself.
    pub weight: DenseMatrix<T>,
    pub bias: Option<DenseMatrix<T>>,
    pub aggregator: SageAggregator,
    /// `in x in`, max-pool only.
    pub pool_weight: Option<DenseMatrix<T>>,
    pub pool_bias: Option<DenseMatrix<T>>,
}

pub struct SageCache<T> {
    h: DenseMatrix<T>,
    cat: DenseMatrix<T>,
    pre: DenseMatrix<T>,
    pool_pre: Option<DenseMatrix<T>>,
    /// For max-pool: winning neighbor per (node, feature), `usize::MAX` when empty.
    argmax: Vec<usize>,
}

impl<T: Scalar> SageParams<T> {
    pub fn init<R: Rng + ?Sized>(
        in_dim: usize,
        out_dim: usize,
        aggregator: SageAggregator,
        bias: bool,
        rng: &mut R,
    ) -> Self {
        let weight = glorot(2 * in_dim, out_dim, rng);
        let (pool_weight, pool_bias) = match aggregator {
            SageAggregator::Mean => (None, None),
            SageAggregator::MaxPool => (Some(glorot(in_dim, in_dim, rng)), Some(DenseMatrix::zeros(1, in_dim))),
        };
        Self {
            weight,
            bias: bias.then(|| DenseMatrix::zeros(1, out_dim)),
            aggregator,
            pool_weight,
            pool_bias,
        }
    }

    fn pool(&self) -> Result<(&DenseMatrix<T>, &DenseMatrix<T>)> {
        match (&self.pool_weight, &self.pool_bias) {
            (Some(w), Some(b)) => Ok((w, b)),
            _ => Err(Error::InvalidArgument(
                "max-pool SAGE layer without pool parameters".into(),
            )),
        }
    }
}

impl<T: Scalar> GraphLayer<T> for SageParams<T> {
    type Cache = SageCache<T>;

    fn input_dim(&self) -> usize {
        self.weight.rows() / 2
    }

    fn output_dim(&self) -> usize {
        self.weight.cols()
    }

    fn forward_cached(&self, h: &DenseMatrix<T>, nb: &Neighborhood) -> Result<(DenseMatrix<T>, SageCache<T>)> {
        check_input("sage_forward", h, nb, self.input_dim())?;
        let (agg, pool_pre, argmax) = match self.aggregator {
            SageAggregator::Mean => (mean_aggregate(h, nb), None, Vec::new()),
            SageAggregator::MaxPool => {
                let (pw, pb) = self.pool()?;
                let pool_pre = h.matmul(pw)?.add_row_broadcast(pb)?;
                let pooled = relu(&pool_pre);
                let d = pooled.cols();
                let mut agg = DenseMatrix::zeros(h.rows(), d);
                let mut argmax = vec![usize::MAX; h.rows() * d];
                for i in 0..h.rows() {
                    for &j in nb.neighbors(i) {
                        for c in 0..d {
                            let slot = &mut argmax[i * d + c];
                            // strict > keeps the lowest-index winner on ties
                            if *slot == usize::MAX || pooled[(j, c)] > agg[(i, c)] {
                                agg[(i, c)] = pooled[(j, c)];
                                *slot = j;
                            }
                        }
                    }
                }
                (agg, Some(pool_pre), argmax)
            }
        };
        let cat = h.hcat(&agg)?;
        let pre = with_bias(cat.matmul(&self.weight)?, &self.bias)?;
        Ok((
            relu(&pre),
            SageCache {
                h: h.clone(),
                cat,
                pre,
                pool_pre,
                argmax,
            },
        ))
    }

    fn backward(
        &self,
        nb: &Neighborhood,
        cache: &SageCache<T>,
        dout: &DenseMatrix<T>,
    ) -> Result<(DenseMatrix<T>, Self)> {
        let d = self.input_dim();
        let dpre = relu_backward(&cache.pre, dout)?;
        let dweight = cache.cat.matmul_tn(&dpre)?;
        let dcat = dpre.matmul_nt(&self.weight)?;
        let mut dh = dcat.col_block(0, d);
        let dagg = dcat.col_block(d, d);

        let (pool_weight, pool_bias) = match self.aggregator {
            SageAggregator::Mean => {
                dh.add_assign(&mean_aggregate_backward(&dagg, nb))?;
                (None, None)
            }
            SageAggregator::MaxPool => {
                let (pw, _) = self.pool()?;
                let pool_pre = cache.pool_pre.as_ref().expect("max-pool cache");
                let mut dpooled = DenseMatrix::zeros(pool_pre.rows(), d);
                for i in 0..dagg.rows() {
                    for c in 0..d {
                        let j = cache.argmax[i * d + c];
                        if j != usize::MAX {
                            dpooled[(j, c)] += dagg[(i, c)];
                        }
                    }
                }
                let dpool_pre = relu_backward(pool_pre, &dpooled)?;
                dh.add_assign(&dpool_pre.matmul_nt(pw)?)?;
                (Some(cache.h.matmul_tn(&dpool_pre)?), Some(dpool_pre.column_sums()))
            }
        };

        Ok((
            dh,
            SageParams {
                weight: dweight,
                bias: bias_grad(&self.bias, &dpre),
                aggregator: self.aggregator,
                pool_weight,
                pool_bias,
            },
        ))
    }

    fn params(&self) -> Vec<&DenseMatrix<T>> {
        std::iter::once(&self.weight)
            .chain(self.bias.as_ref())
            .chain(self.pool_weight.as_ref())
            .chain(self.pool_bias.as_ref())
            .collect()
    }

    fn params_mut(&mut self) -> Vec<&mut DenseMatrix<T>> {
        std::iter::once(&mut self.weight)
            .chain(self.bias.as_mut())
            .chain(self.pool_weight.as_mut())
            .chain(self.pool_bias.as_mut())
            .collect()
    }
}

pub fn sage_forward<T: Scalar>(
    h: &DenseMatrix<T>,
    nb: &Neighborhood,
    p: &SageParams<T>,
    aggregator: SageAggregator,
) -> Result<DenseMatrix<T>> {
    if p.aggregator != aggregator {
        return Err(Error::InvalidArgument(format!(
            "layer was built for {:?} aggregation, asked for {aggregator:?}",
            p.aggregator
        )));
    }
    p.forward(h, nb)
}
