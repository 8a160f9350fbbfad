//! Degree-normalized graph convolution: `h'_i = ReLU(W · (1/deg_i) Σ_{j∈N(i)} h_j)`.
//!
//! Normalization is the plain row mean, not the symmetric `1/√(deg_i·deg_j)`
//! variant. Self-loops come from the neighborhood policy.

use rand::Rng;

use super::neighborhood::{mean_aggregate, mean_aggregate_backward};
use super::{bias_grad, check_input, glorot, with_bias, GraphLayer, Neighborhood};
use crate::error::Result;
use crate::numeric::{relu, relu_backward, DenseMatrix, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct GcnParams<T> {
    pub weight: DenseMatrix<T>,
    pub bias: Option<DenseMatrix<T>>,
}

pub struct GcnCache<T> {
    agg: DenseMatrix<T>,
    pre: DenseMatrix<T>,
}

impl<T: Scalar> GcnParams<T> {
    pub fn init<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, bias: bool, rng: &mut R) -> Self {
        Self {
            weight: glorot(in_dim, out_dim, rng),
            bias: bias.then(|| DenseMatrix::zeros(1, out_dim)),
        }
    }
}

impl<T: Scalar> GraphLayer<T> for GcnParams<T> {
    type Cache = GcnCache<T>;

    fn input_dim(&self) -> usize {
        self.weight.rows()
    }

    fn output_dim(&self) -> usize {
        self.weight.cols()
    }

    fn forward_cached(&self, h: &DenseMatrix<T>, nb: &Neighborhood) -> Result<(DenseMatrix<T>, GcnCache<T>)> {
        check_input("gcn_forward", h, nb, self.input_dim())?;
        let agg = mean_aggregate(h, nb);
        let pre = with_bias(agg.matmul(&self.weight)?, &self.bias)?;
        Ok((relu(&pre), GcnCache { agg, pre }))
    }

    fn backward(
        &self,
        nb: &Neighborhood,
        cache: &GcnCache<T>,
        dout: &DenseMatrix<T>,
    ) -> Result<(DenseMatrix<T>, Self)> {
        let dpre = relu_backward(&cache.pre, dout)?;
        let grads = GcnParams {
            weight: cache.agg.matmul_tn(&dpre)?,
            bias: bias_grad(&self.bias, &dpre),
        };
        let dagg = dpre.matmul_nt(&self.weight)?;
        Ok((mean_aggregate_backward(&dagg, nb), grads))
    }

    fn params(&self) -> Vec<&DenseMatrix<T>> {
        std::iter::once(&self.weight).chain(self.bias.as_ref()).collect()
    }

    fn params_mut(&mut self) -> Vec<&mut DenseMatrix<T>> {
        std::iter::once(&mut self.weight).chain(self.bias.as_mut()).collect()
    }
}

pub fn gcn_forward<T: Scalar>(h: &DenseMatrix<T>, nb: &Neighborhood, p: &GcnParams<T>) -> Result<DenseMatrix<T>> {
    p.forward(h, nb)
}
