//! Weisfeiler-Lehman color refinement, used as a brute-force oracle for
//! what a sum-aggregating GNN can tell apart.

use std::collections::BTreeMap;

use crate::layers::{NeighborPolicy, Neighborhood};

/// Colors of the disjoint union of `graphs` after `rounds` refinements from a
/// uniform start. Colors are canonical: the same multiset history always gets
/// the same id, so histograms are comparable across graphs.
pub fn refine(graphs: &[(usize, &[(usize, usize)])], rounds: usize) -> Vec<Vec<usize>> {
    let nbs: Vec<Neighborhood> = graphs
        .iter()
        .map(|&(n, edges)| {
            Neighborhood::from_edges(
                n,
                edges,
                NeighborPolicy {
                    symmetrize: true,
                    self_loops: false,
                },
            )
        })
        .collect();
    let mut colors: Vec<Vec<usize>> = graphs.iter().map(|&(n, _)| vec![0; n]).collect();
    for _ in 0..rounds {
        let mut palette: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let signatures: Vec<Vec<(usize, Vec<usize>)>> = colors
            .iter()
            .zip(&nbs)
            .map(|(c, nb)| {
                (0..c.len())
                    .map(|v| {
                        let mut m: Vec<usize> = nb.neighbors(v).iter().map(|&u| c[u]).collect();
                        m.sort_unstable();
                        (c[v], m)
                    })
                    .collect()
            })
            .collect();
        for sig in signatures.iter().flatten() {
            let next = palette.len();
            palette.entry(sig.clone()).or_insert(next);
        }
        // renumber in sorted signature order so ids do not depend on graph order
        for (i, id) in palette.values_mut().enumerate() {
            *id = i;
        }
        colors = signatures
            .iter()
            .map(|s| s.iter().map(|k| palette[k]).collect())
            .collect();
    }
    colors
}

/// Sorted color histogram of one graph.
pub fn histogram(colors: &[usize]) -> Vec<(usize, usize)> {
    let mut h: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in colors {
        *h.entry(c).or_default() += 1;
    }
    h.into_iter().collect()
}

/// True when 1-WL separates the two graphs within `n1 + n2` rounds, the
/// point by which refinement has always stabilized.
pub fn wl_distinguishable(a: (usize, &[(usize, usize)]), b: (usize, &[(usize, usize)])) -> bool {
    let rounds = a.0 + b.0;
    (1..=rounds).any(|r| {
        let c = refine(&[a, b], r);
        histogram(&c[0]) != histogram(&c[1])
    })
}
