//! Propagation graphs: data model, validation, JSONL I/O, splitting and batching.

mod batch;
mod io;
mod split;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use batch::{batch_graphs, GraphBatch};
pub use io::{load_dataset, read_dataset, save_dataset, write_dataset};
pub use split::{apply_split, load_split, save_split, split_dataset, split_indices, SplitFile};

use crate::error::{Error, Result};

pub const REAL: u8 = 0;
pub const FAKE: u8 = 1;

/// One news item: a tree rooted at node 0 (the news node) whose other nodes
/// are engaged users. Edges point parent to child.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationGraph {
    pub id: String,
    pub label: u8,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub x: Vec<Vec<f64>>,
}

impl PropagationGraph {
    pub fn feature_dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }
}

/// Every violated invariant of `g`; empty means valid.
pub fn validate_graph(g: &PropagationGraph, tree_mode: bool) -> Vec<String> {
    let mut out = Vec::new();
    if g.n == 0 {
        out.push("n must be at least 1".to_string());
    }
    if g.label > 1 {
        out.push(format!("label {} is not 0 or 1", g.label));
    }
    if g.x.len() != g.n {
        out.push(format!("x has {} rows, expected n={}", g.x.len(), g.n));
    }
    let d = g.feature_dim();
    for (i, row) in g.x.iter().enumerate() {
        if row.len() != d {
            out.push(format!("x row {i} has dimension {}, expected {d}", row.len()));
        }
        if row.iter().any(|v| !v.is_finite()) {
            out.push(format!("x row {i} has a non-finite entry"));
        }
    }
    let mut in_bounds = true;
    for &(s, t) in &g.edges {
        if s >= g.n || t >= g.n {
            out.push(format!("edge ({s}, {t}) out of bounds for n={}", g.n));
            in_bounds = false;
        }
    }
    if tree_mode && g.n > 0 {
        if g.edges.len() + 1 != g.n {
            out.push(format!("|edges| ≠ n−1 ({} edges, n={})", g.edges.len(), g.n));
        }
        if in_bounds {
            tree_violations(g, &mut out);
        }
    }
    out
}

fn tree_violations(g: &PropagationGraph, out: &mut Vec<String>) {
    let n = g.n;
    let mut parents = vec![0usize; n];
    let mut children = vec![Vec::new(); n];
    for &(s, t) in &g.edges {
        parents[t] += 1;
        children[s].push(t);
    }
    if parents[0] > 0 {
        out.push("root 0 has a parent".to_string());
    }
    for (v, &p) in parents.iter().enumerate().skip(1) {
        if p != 1 {
            out.push(format!("node {v} has {p} parents, expected 1"));
        }
    }

    // Kahn's algorithm: anything left with positive in-degree sits on or behind a cycle.
    let mut indeg = parents.clone();
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = queue.pop() {
        removed += 1;
        for &c in &children[v] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                queue.push(c);
            }
        }
    }
    if removed < n {
        out.push("edges contain a cycle".to_string());
    }

    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &c in &children[v] {
            if !seen[c] {
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    let unreachable: Vec<usize> = (0..n).filter(|&v| !seen[v]).collect();
    if !unreachable.is_empty() {
        out.push(format!("nodes {unreachable:?} unreachable from root 0"));
    }
}

/// Validated collection of graphs sharing one feature dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub feature_dim: usize,
    pub graphs: Vec<PropagationGraph>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub graphs: usize,
    pub fake: usize,
    pub nodes: usize,
    pub edges: usize,
}

impl Dataset {
    /// Checks the dataset-level invariants and every graph.
    pub fn new(name: impl Into<String>, graphs: Vec<PropagationGraph>, tree_mode: bool) -> Result<Self> {
        let first = graphs.first().ok_or(Error::NoGraphs)?;
        let feature_dim = first.feature_dim();
        let mut ids = HashSet::with_capacity(graphs.len());
        for g in &graphs {
            let mut violations = validate_graph(g, tree_mode);
            if g.feature_dim() != feature_dim {
                violations.push(format!(
                    "feature dimension {} differs from dataset dimension {feature_dim}",
                    g.feature_dim()
                ));
            }
            if !ids.insert(g.id.as_str()) {
                violations.push("duplicate id".to_string());
            }
            if !violations.is_empty() {
                return Err(Error::InvalidGraph {
                    id: g.id.clone(),
                    violations,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            feature_dim,
            graphs,
        })
    }

    /// Subset without re-validation; `graphs` must come from a valid dataset.
    pub(crate) fn subset(&self, name: String, graphs: Vec<PropagationGraph>) -> Self {
        Self {
            name,
            feature_dim: self.feature_dim,
            graphs,
        }
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn stats(&self) -> DatasetStats {
        DatasetStats {
            graphs: self.graphs.len(),
            fake: self.graphs.iter().filter(|g| g.label == FAKE).count(),
            nodes: self.graphs.iter().map(|g| g.n).sum(),
            edges: self.graphs.iter().map(|g| g.edges.len()).sum(),
        }
    }
}
