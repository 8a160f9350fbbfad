use serde::{Deserialize, Serialize};

use crate::graph::GraphBatch;
use crate::numeric::{DenseMatrix, Scalar};

/// How directed parent→child edges become neighbor sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborPolicy {
    pub symmetrize: bool,
    pub self_loops: bool,
}

/// Per-node neighbor lists in compressed form. Lists built from edges are
/// sorted and duplicate-free; `from_lists` keeps whatever it is given, which
/// lets tests build multisets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Neighborhood {
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)], policy: NeighborPolicy) -> Self {
        let mut lists = vec![Vec::new(); node_count];
        for &(s, t) in edges {
            // message flows from source to target: t aggregates s
            lists[t].push(s);
            if policy.symmetrize {
                lists[s].push(t);
            }
        }
        if policy.self_loops {
            for (i, l) in lists.iter_mut().enumerate() {
                l.push(i);
            }
        }
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        Self::from_lists(lists)
    }

    pub fn from_lists(lists: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::new();
        for l in lists {
            neighbors.extend(l);
            offsets.push(neighbors.len());
        }
        Self { offsets, neighbors }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Position of node `i`'s first neighbor in the flat edge order.
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|i| self.degree(i)).collect()
    }

    /// Same neighborhoods after relabeling node `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut lists = vec![Vec::new(); self.node_count()];
        for (i, slot) in perm.iter().enumerate() {
            let mut l: Vec<usize> = self.neighbors(i).iter().map(|&j| perm[j]).collect();
            l.sort_unstable();
            lists[*slot] = l;
        }
        Self::from_lists(lists)
    }
}

pub fn build_neighborhood<T: Scalar>(batch: &GraphBatch<T>, symmetrize: bool, self_loops: bool) -> Neighborhood {
    Neighborhood::from_edges(
        batch.node_count(),
        &batch.edges,
        NeighborPolicy { symmetrize, self_loops },
    )
}

/// Row `i` = Σ_{j∈N(i)} h_j.
pub(crate) fn sum_aggregate<T: Scalar>(h: &DenseMatrix<T>, nb: &Neighborhood) -> DenseMatrix<T> {
    let mut out = DenseMatrix::zeros(h.rows(), h.cols());
    for i in 0..nb.node_count() {
        for &j in nb.neighbors(i) {
            let src = h.row(j).to_vec();
            for (o, v) in out.row_mut(i).iter_mut().zip(src) {
                *o += v;
            }
        }
    }
    out
}

/// Adjoint of `sum_aggregate`.
pub(crate) fn sum_aggregate_backward<T: Scalar>(grad: &DenseMatrix<T>, nb: &Neighborhood) -> DenseMatrix<T> {
    let mut out = DenseMatrix::zeros(grad.rows(), grad.cols());
    for i in 0..nb.node_count() {
        for &j in nb.neighbors(i) {
            let g = grad.row(i).to_vec();
            for (o, v) in out.row_mut(j).iter_mut().zip(g) {
                *o += v;
            }
        }
    }
    out
}

/// Row `i` = (1/deg_i) Σ_{j∈N(i)} h_j, zero when deg_i = 0.
pub(crate) fn mean_aggregate<T: Scalar>(h: &DenseMatrix<T>, nb: &Neighborhood) -> DenseMatrix<T> {
    let mut out = sum_aggregate(h, nb);
    for i in 0..nb.node_count() {
        let d = nb.degree(i);
        if d > 1 {
            let inv = T::one() / T::of(d as f64);
            out.row_mut(i).iter_mut().for_each(|v| *v *= inv);
        }
    }
    out
}

pub(crate) fn mean_aggregate_backward<T: Scalar>(grad: &DenseMatrix<T>, nb: &Neighborhood) -> DenseMatrix<T> {
    let mut scaled = grad.clone();
    for i in 0..nb.node_count() {
        let d = nb.degree(i);
        if d > 1 {
            let inv = T::one() / T::of(d as f64);
            scaled.row_mut(i).iter_mut().for_each(|v| *v *= inv);
        }
    }
    sum_aggregate_backward(&scaled, nb)
}
