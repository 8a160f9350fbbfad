//! Graph isomorphism layer: `h'_i = MLP((1 + ε) h_i + Σ_{j∈N(i)} h_j)` with a
//! two-layer MLP `W2 · ReLU(W1 · z + b1) + b2`.

use rand::Rng;

use super::neighborhood::{sum_aggregate, sum_aggregate_backward};
use super::{check_input, glorot, GraphLayer, Neighborhood};
use crate::error::Result;
use crate::numeric::{relu, relu_backward, DenseMatrix, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct GinParams<T> {
    /// `1 x 1`.
    pub eps: DenseMatrix<T>,
    pub learn_eps: bool,
    pub w1: DenseMatrix<T>,
    pub b1: DenseMatrix<T>,
    pub w2: DenseMatrix<T>,
    pub b2: DenseMatrix<T>,
}

pub struct GinCache<T> {
    h: DenseMatrix<T>,
    z: DenseMatrix<T>,
    hidden_pre: DenseMatrix<T>,
    hidden: DenseMatrix<T>,
}

impl<T: Scalar> GinParams<T> {
    /// Hidden width equals `out_dim`; ε starts at 0.
    pub fn init<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, learn_eps: bool, rng: &mut R) -> Self {
        Self {
            eps: DenseMatrix::zeros(1, 1),
            learn_eps,
            w1: glorot(in_dim, out_dim, rng),
            b1: DenseMatrix::zeros(1, out_dim),
            w2: glorot(out_dim, out_dim, rng),
            b2: DenseMatrix::zeros(1, out_dim),
        }
    }

    pub fn epsilon(&self) -> T {
        self.eps[(0, 0)]
    }

    /// The MLP alone, applied row-wise.
    pub fn mlp(&self, z: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let hidden = relu(&z.matmul(&self.w1)?.add_row_broadcast(&self.b1)?);
        hidden.matmul(&self.w2)?.add_row_broadcast(&self.b2)
    }
}

impl<T: Scalar> GraphLayer<T> for GinParams<T> {
    type Cache = GinCache<T>;

    fn input_dim(&self) -> usize {
        self.w1.rows()
    }

    fn output_dim(&self) -> usize {
        self.w2.cols()
    }

    fn forward_cached(&self, h: &DenseMatrix<T>, nb: &Neighborhood) -> Result<(DenseMatrix<T>, GinCache<T>)> {
        check_input("gin_forward", h, nb, self.input_dim())?;
        let mut z = sum_aggregate(h, nb);
        z.add_assign(&h.scale(T::one() + self.epsilon()))?;
        let hidden_pre = z.matmul(&self.w1)?.add_row_broadcast(&self.b1)?;
        let hidden = relu(&hidden_pre);
        let out = hidden.matmul(&self.w2)?.add_row_broadcast(&self.b2)?;
        Ok((
            out,
            GinCache {
                h: h.clone(),
                z,
                hidden_pre,
                hidden,
            },
        ))
    }

    fn backward(
        &self,
        nb: &Neighborhood,
        cache: &GinCache<T>,
        dout: &DenseMatrix<T>,
    ) -> Result<(DenseMatrix<T>, Self)> {
        let dw2 = cache.hidden.matmul_tn(dout)?;
        let db2 = dout.column_sums();
        let dhidden = relu_backward(&cache.hidden_pre, &dout.matmul_nt(&self.w2)?)?;
        let dw1 = cache.z.matmul_tn(&dhidden)?;
        let db1 = dhidden.column_sums();
        let dz = dhidden.matmul_nt(&self.w1)?;
        let deps = dz.hadamard(&cache.h)?.sum();
        let mut dh = sum_aggregate_backward(&dz, nb);
        dh.add_assign(&dz.scale(T::one() + self.epsilon()))?;
        Ok((
            dh,
            GinParams {
                eps: DenseMatrix::filled(1, 1, if self.learn_eps { deps } else { T::zero() }),
                learn_eps: self.learn_eps,
                w1: dw1,
                b1: db1,
                w2: dw2,
                b2: db2,
            },
        ))
    }

    fn params(&self) -> Vec<&DenseMatrix<T>> {
        let mut v = vec![&self.w1, &self.b1, &self.w2, &self.b2];
        if self.learn_eps {
            v.push(&self.eps);
        }
        v
    }

    fn params_mut(&mut self) -> Vec<&mut DenseMatrix<T>> {
        let mut v = vec![&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2];
        if self.learn_eps {
            v.push(&mut self.eps);
        }
        v
    }
}

pub fn gin_forward<T: Scalar>(h: &DenseMatrix<T>, nb: &Neighborhood, p: &GinParams<T>) -> Result<DenseMatrix<T>> {
    p.forward(h, nb)
}
