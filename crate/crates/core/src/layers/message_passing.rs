//! Generic aggregate-then-update step, written node by node.
//!
//! This is the reference path. The specialized layers compute the same
//! quantities with matrix kernels and are checked against compositions of
//! this step.

use super::Neighborhood;
use crate::error::{Error, Result};
use crate::numeric::{DenseMatrix, Scalar};

pub enum Aggregate<'a, T> {
    Sum,
    Mean,
    Max,
    /// Σ_j w(i, j) h_j.
    Weighted(&'a dyn Fn(usize, usize) -> T),
}

/// `h'_i = update(h_i, aggregate({h_j : j ∈ N(i)}))`. An empty neighborhood
/// aggregates to the zero vector for every aggregate kind.
pub fn message_passing_step<T, U>(
    h: &DenseMatrix<T>,
    nb: &Neighborhood,
    aggregate: Aggregate<'_, T>,
    update: U,
) -> Result<DenseMatrix<T>>
where
    T: Scalar,
    U: Fn(&[T], &[T]) -> Vec<T>,
{
    if h.rows() != nb.node_count() {
        return Err(Error::Shape {
            op: "message_passing_step",
            left: h.shape(),
            right: (nb.node_count(), h.cols()),
        });
    }
    let d = h.cols();
    let mut rows = Vec::with_capacity(h.rows());
    for i in 0..h.rows() {
        let ns = nb.neighbors(i);
        let mut agg = vec![T::zero(); d];
        if !ns.is_empty() {
            match &aggregate {
                Aggregate::Sum | Aggregate::Mean => {
                    for &j in ns {
                        for (a, &v) in agg.iter_mut().zip(h.row(j)) {
                            *a += v;
                        }
                    }
                    if matches!(aggregate, Aggregate::Mean) {
                        let n = T::of(ns.len() as f64);
                        agg.iter_mut().for_each(|a| *a /= n);
                    }
                }
                Aggregate::Max => {
                    agg = h.row(ns[0]).to_vec();
                    for &j in &ns[1..] {
                        for (a, &v) in agg.iter_mut().zip(h.row(j)) {
                            *a = a.max(v);
                        }
                    }
                }
                Aggregate::Weighted(w) => {
                    for &j in ns {
                        let wij = w(i, j);
                        for (a, &v) in agg.iter_mut().zip(h.row(j)) {
                            *a += wij * v;
                        }
                    }
                }
            }
        }
        rows.push(update(h.row(i), &agg));
    }
    if rows.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(Error::InvalidArgument("update returned rows of differing width".into()));
    }
    DenseMatrix::from_rows(&rows)
}

/// `x W + b` for a single row, summed in index order.
pub fn affine_row<T: Scalar>(x: &[T], weight: &DenseMatrix<T>, bias: Option<&DenseMatrix<T>>) -> Vec<T> {
    assert_eq!(x.len(), weight.rows(), "affine_row input width");
    (0..weight.cols())
        .map(|c| {
            let mut acc = bias.map_or(T::zero(), |b| b[(0, c)]);
            for (r, &v) in x.iter().enumerate() {
                acc += v * weight[(r, c)];
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::NeighborPolicy;

    type M = DenseMatrix<f64>;

    fn id(_: &[f64], agg: &[f64]) -> Vec<f64> {
        agg.to_vec()
    }

    #[test]
    fn sum_equals_dense_adjacency_product() {
        let edges = [(0, 1), (0, 2), (2, 3)];
        let nb = Neighborhood::from_edges(
            4,
            &edges,
            NeighborPolicy {
                symmetrize: true,
                self_loops: false,
            },
        );
        let mut adj = M::zeros(4, 4);
        for &(s, t) in &edges {
            adj[(s, t)] = 1.0;
            adj[(t, s)] = 1.0;
        }
        let h = M::from_fn(4, 3, |r, c| (r as f64 + 1.0) * (c as f64 - 0.5));
        let out = message_passing_step(&h, &nb, Aggregate::Sum, id).unwrap();
        assert!(out.max_abs_diff(&adj.matmul(&h).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn isolated_node_aggregates_to_zero() {
        let nb = Neighborhood::from_lists(vec![vec![]]);
        let h = M::row_vector(&[3.0, -4.0]);
        for agg in [Aggregate::Mean, Aggregate::Max, Aggregate::Sum] {
            let out = message_passing_step(&h, &nb, agg, id).unwrap();
            assert_eq!(out.as_slice(), &[0.0, 0.0]);
        }
    }

    #[test]
    fn elementwise_max() {
        let nb = Neighborhood::from_lists(vec![vec![1, 2], vec![], vec![]]);
        let h = M::from_rows(&[[0.0, 0.0], [1.0, 5.0], [3.0, 2.0]]).unwrap();
        let out = message_passing_step(&h, &nb, Aggregate::Max, id).unwrap();
        assert_eq!(out.row(0), &[3.0, 5.0]);
    }

    #[test]
    fn multiset_sensitivity_of_sum_versus_mean() {
        let h = M::from_rows(&[[0.0], [2.0], [2.0]]).unwrap();
        let once = Neighborhood::from_lists(vec![vec![1], vec![], vec![]]);
        let twice = Neighborhood::from_lists(vec![vec![1, 2], vec![], vec![]]);
        let s1 = message_passing_step(&h, &once, Aggregate::Sum, id).unwrap();
        let s2 = message_passing_step(&h, &twice, Aggregate::Sum, id).unwrap();
        let m1 = message_passing_step(&h, &once, Aggregate::Mean, id).unwrap();
        let m2 = message_passing_step(&h, &twice, Aggregate::Mean, id).unwrap();
        assert_ne!(s1.row(0), s2.row(0));
        assert_eq!(m1.row(0), m2.row(0));
    }

    #[test]
    fn affine_row_matches_matmul() {
        let w = M::from_fn(3, 2, |r, c| r as f64 - 2.0 * c as f64);
        let b = M::row_vector(&[0.5, -1.0]);
        let x = [1.0, 2.0, 3.0];
        let want = M::row_vector(&x).matmul(&w).unwrap().add(&b).unwrap();
        assert_eq!(affine_row(&x, &w, Some(&b)), want.as_slice());
    }
}
