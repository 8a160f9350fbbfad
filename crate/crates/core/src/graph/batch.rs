use std::borrow::Borrow;

use super::PropagationGraph;
use crate::error::{Error, Result};
use crate::numeric::{DenseMatrix, Scalar};

/// Disjoint union of graphs. Node rows are stacked in input order and edge
/// endpoints are shifted by each graph's node offset.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphBatch<T> {
    pub node_features: DenseMatrix<T>,
    pub edges: Vec<(usize, usize)>,
    /// Graph index of each node.
    pub assignment: Vec<usize>,
    pub labels: Vec<usize>,
    /// `offsets[g]..offsets[g + 1]` are the node rows of graph `g`.
    pub offsets: Vec<usize>,
}

impl<T: Scalar> GraphBatch<T> {
    pub fn graph_count(&self) -> usize {
        self.labels.len()
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn node_range(&self, g: usize) -> std::ops::Range<usize> {
        self.offsets[g]..self.offsets[g + 1]
    }

    /// Features and local edges of graph `g`.
    pub fn graph_slice(&self, g: usize) -> (DenseMatrix<T>, Vec<(usize, usize)>) {
        let range = self.node_range(g);
        let feats = self.node_features.row_block(range.start, range.len());
        let edges = self
            .edges
            .iter()
            .filter(|&&(s, _)| range.contains(&s))
            .map(|&(s, t)| (s - range.start, t - range.start))
            .collect();
        (feats, edges)
    }
}

pub fn batch_graphs<T: Scalar, G: Borrow<PropagationGraph>>(graphs: &[G]) -> Result<GraphBatch<T>> {
    let first = graphs.first().ok_or(Error::Empty("graph list"))?.borrow();
    let dim = first.feature_dim();
    let total: usize = graphs.iter().map(|g| g.borrow().n).sum();

    let mut data = Vec::with_capacity(total * dim);
    let mut edges = Vec::new();
    let mut assignment = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(graphs.len());
    let mut offsets = Vec::with_capacity(graphs.len() + 1);
    offsets.push(0);

    for (gi, g) in graphs.iter().enumerate() {
        let g = g.borrow();
        let base = *offsets.last().unwrap();
        if g.x.len() != g.n {
            return Err(Error::InvalidGraph {
                id: g.id.clone(),
                violations: vec![format!("x has {} rows, expected n={}", g.x.len(), g.n)],
            });
        }
        for row in &g.x {
            if row.len() != dim {
                return Err(Error::Shape {
                    op: "batch_graphs",
                    left: (g.n, row.len()),
                    right: (first.n, dim),
                });
            }
            data.extend(row.iter().map(|&v| T::of(v)));
        }
        edges.extend(g.edges.iter().map(|&(s, t)| (s + base, t + base)));
        assignment.extend(std::iter::repeat_n(gi, g.n));
        labels.push(usize::from(g.label));
        offsets.push(base + g.n);
    }

    Ok(GraphBatch {
        node_features: DenseMatrix::new(total, dim, data)?,
        edges,
        assignment,
        labels,
        offsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(id: &str, n: usize, edges: &[(usize, usize)], dim: usize, base: f64) -> PropagationGraph {
        PropagationGraph {
            id: id.into(),
            label: 1,
            n,
            edges: edges.to_vec(),
            x: (0..n).map(|i| vec![base + i as f64; dim]).collect(),
        }
    }

    #[test]
    fn offsets_shift_second_graph() {
        let a = g("a", 3, &[(0, 1), (0, 2)], 2, 0.0);
        let b = g("b", 2, &[(0, 1)], 2, 10.0);
        let batch: GraphBatch<f64> = batch_graphs(&[a, b]).unwrap();
        assert_eq!(batch.node_count(), 5);
        assert_eq!(batch.edges, vec![(0, 1), (0, 2), (3, 4)]);
        assert_eq!(batch.assignment, vec![0, 0, 0, 1, 1]);
        assert_eq!(batch.offsets, vec![0, 3, 5]);
        for &(s, t) in &batch.edges {
            assert_eq!(batch.assignment[s], batch.assignment[t]);
        }
    }

    #[test]
    fn single_graph_is_identity() {
        let a = g("a", 4, &[(0, 1), (1, 2), (1, 3)], 3, 0.5);
        let batch: GraphBatch<f64> = batch_graphs(std::slice::from_ref(&a)).unwrap();
        assert_eq!(batch.node_features, DenseMatrix::from_rows(&a.x).unwrap());
        assert_eq!(batch.edges, a.edges);
    }

    #[test]
    fn mixed_dims_and_empty_rejected() {
        let a = g("a", 2, &[(0, 1)], 10, 0.0);
        let b = g("b", 2, &[(0, 1)], 300, 0.0);
        assert!(batch_graphs::<f64, _>(&[a, b]).is_err());
        assert!(batch_graphs::<f64, PropagationGraph>(&[]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn slicing_recovers_inputs(sizes in proptest::collection::vec(1usize..7, 1..6)) {
            let graphs: Vec<_> = sizes
                .iter()
                .enumerate()
                .map(|(k, &n)| {
                    let edges: Vec<_> = (1..n).map(|v| (v / 2, v)).collect();
                    g(&format!("g{k}"), n, &edges, 2, k as f64 * 100.0)
                })
                .collect();
            let batch: GraphBatch<f64> = batch_graphs(&graphs).unwrap();
            for (k, gr) in graphs.iter().enumerate() {
                let (feats, edges) = batch.graph_slice(k);
                proptest::prop_assert_eq!(feats, DenseMatrix::from_rows(&gr.x).unwrap());
                proptest::prop_assert_eq!(&edges, &gr.edges);
            }
        }
    }
}
