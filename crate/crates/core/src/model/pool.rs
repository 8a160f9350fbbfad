use crate::graph::GraphBatch;
use crate::numeric::{DenseMatrix, Scalar};

/// Graph embedding = mean of the graph's node rows.
pub fn global_mean_pool<T: Scalar>(node_features: &DenseMatrix<T>, batch: &GraphBatch<T>) -> DenseMatrix<T> {
    assert_eq!(node_features.rows(), batch.node_count(), "pool input rows");
    let mut out = DenseMatrix::zeros(batch.graph_count(), node_features.cols());
    for g in 0..batch.graph_count() {
        let range = batch.node_range(g);
        let inv = T::one() / T::of(range.len() as f64);
        let dst = out.row_mut(g);
        for r in range {
            for (o, &v) in dst.iter_mut().zip(node_features.row(r)) {
                *o += v;
            }
        }
        dst.iter_mut().for_each(|v| *v *= inv);
    }
    out
}

pub(crate) fn global_mean_pool_backward<T: Scalar>(grad: &DenseMatrix<T>, batch: &GraphBatch<T>) -> DenseMatrix<T> {
    let mut out = DenseMatrix::zeros(batch.node_count(), grad.cols());
    for g in 0..batch.graph_count() {
        let range = batch.node_range(g);
        let inv = T::one() / T::of(range.len() as f64);
        let src: Vec<T> = grad.row(g).iter().map(|&v| v * inv).collect();
        for r in range {
            out.row_mut(r).copy_from_slice(&src);
        }
    }
    out
}
