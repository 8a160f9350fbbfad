//! Message-passing layers.
//!
//! Every layer exposes a cached forward pass and an analytic backward pass
//! returning the input gradient together with parameter gradients in the
//! same struct shape as the parameters.

mod gat;
mod gcn;
mod gin;
mod message_passing;
mod neighborhood;
mod sage;

use rand::Rng;

pub use gat::{gat_forward, GatCache, GatHead, GatParams, DEFAULT_LEAKY_SLOPE};
pub use gcn::{gcn_forward, GcnCache, GcnParams};
pub use gin::{gin_forward, GinCache, GinParams};
pub use message_passing::{affine_row, message_passing_step, Aggregate};
pub use neighborhood::{build_neighborhood, NeighborPolicy, Neighborhood};
pub use sage::{sage_forward, SageAggregator, SageCache, SageParams};

use crate::error::Result;
use crate::numeric::{DenseMatrix, Scalar};

pub trait GraphLayer<T: Scalar>: Sized {
    type Cache;

    fn input_dim(&self) -> usize;

    fn output_dim(&self) -> usize;

    fn forward_cached(&self, h: &DenseMatrix<T>, nb: &Neighborhood) -> Result<(DenseMatrix<T>, Self::Cache)>;

    /// Returns `(d input, parameter gradients)` for upstream gradient `dout`.
    fn backward(&self, nb: &Neighborhood, cache: &Self::Cache, dout: &DenseMatrix<T>)
        -> Result<(DenseMatrix<T>, Self)>;

    fn params(&self) -> Vec<&DenseMatrix<T>>;

    /// Trainable parameters, in the same order as `params`.
    fn params_mut(&mut self) -> Vec<&mut DenseMatrix<T>>;

    fn forward(&self, h: &DenseMatrix<T>, nb: &Neighborhood) -> Result<DenseMatrix<T>> {
        Ok(self.forward_cached(h, nb)?.0)
    }
}

/// Uniform(−a, a) with a = √(6 / (fan_in + fan_out)).
pub fn glorot<T: Scalar, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix<T> {
    let a = (6.0 / (rows + cols) as f64).sqrt();
    DenseMatrix::from_fn(rows, cols, |_, _| T::of(rng.random_range(-a..a)))
}

pub(crate) fn check_input<T: Scalar>(
    op: &'static str,
    h: &DenseMatrix<T>,
    nb: &Neighborhood,
    in_dim: usize,
) -> Result<()> {
    if h.rows() != nb.node_count() || h.cols() != in_dim {
        return Err(crate::error::Error::Shape {
            op,
            left: h.shape(),
            right: (nb.node_count(), in_dim),
        });
    }
    Ok(())
}

pub(crate) fn bias_grad<T: Scalar>(bias: &Option<DenseMatrix<T>>, dpre: &DenseMatrix<T>) -> Option<DenseMatrix<T>> {
    bias.as_ref().map(|_| dpre.column_sums())
}

pub(crate) fn with_bias<T: Scalar>(x: DenseMatrix<T>, bias: &Option<DenseMatrix<T>>) -> Result<DenseMatrix<T>> {
    match bias {
        Some(b) => x.add_row_broadcast(b),
        None => Ok(x),
    }
}
