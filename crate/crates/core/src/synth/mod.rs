//! Labeled synthetic propagation trees.
//!
//! Node counts follow `2 + Geometric(p)` with `p` chosen so the mean equals
//! `avg_nodes`. Class signal lives in the feature means: every node is drawn
//! from `N(±δ·u, I)` along a seeded unit direction `u` (plus for fake, minus
//! for real), and the root gets twice the shift. Graph `i` uses its own RNG
//! stream, so generation order never changes the output.

mod corpus;

use rand::Rng;
use rand_distr::{Distribution, Geometric, StandardNormal};
use serde::{Deserialize, Serialize};

pub use corpus::{root_corpus, token_for_dim};

use crate::error::{Error, Result};
use crate::graph::{Dataset, DatasetStats, PropagationGraph, FAKE, REAL};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Attachment {
    /// Parent drawn uniformly from existing nodes (random recursive tree).
    #[default]
    Uniform,
    /// Parent drawn with probability proportional to degree + 1.
    Preferential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub num_graphs: usize,
    pub avg_nodes: f64,
    pub feature_dim: usize,
    pub separation: f64,
    pub attachment: Attachment,
    /// Fake graphs always use preferential attachment.
    pub structural_signal: bool,
    pub seed: u64,
    pub name: String,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            num_graphs: 500,
            avg_nodes: 58.0,
            feature_dim: 10,
            separation: 0.5,
            attachment: Attachment::Uniform,
            structural_signal: false,
            seed: 7,
            name: "synthetic".into(),
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_graphs < 2 {
            return Err(Error::InvalidArgument(format!(
                "num_graphs must be at least 2, got {}",
                self.num_graphs
            )));
        }
        if !(self.avg_nodes >= 2.0 && self.avg_nodes.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "avg_nodes must be at least 2, got {}",
                self.avg_nodes
            )));
        }
        if self.feature_dim == 0 {
            return Err(Error::InvalidArgument("feature_dim must be positive".into()));
        }
        if !(self.separation >= 0.0 && self.separation.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "separation must be ≥ 0, got {}",
                self.separation
            )));
        }
        Ok(())
    }
}

/// Params echo plus realized totals, written next to generated data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenMetadata {
    pub params: GenParams,
    pub totals: DatasetStats,
}

/// Rooted tree on `n` nodes: node `v ≥ 1` attaches to one earlier node.
pub fn generate_tree<R: Rng + ?Sized>(n: usize, attachment: Attachment, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    // each node appears (degree + 1) times
    let mut urn: Vec<usize> = vec![0];
    for v in 1..n {
        let parent = match attachment {
            Attachment::Uniform => rng.random_range(0..v),
            Attachment::Preferential => urn[rng.random_range(0..urn.len())],
        };
        edges.push((parent, v));
        if attachment == Attachment::Preferential {
            urn.push(parent);
            urn.push(v);
            urn.push(v);
        }
    }
    edges
}

pub fn unit_direction(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = seed::rng_for(seed, "direction");
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn generate_graph(p: &GenParams, index: usize, direction: &[f64]) -> PropagationGraph {
    let mut rng = seed::rng_indexed(p.seed, "graph", index as u64);
    let label = if index % 2 == 1 { FAKE } else { REAL };
    let n = if p.avg_nodes <= 2.0 {
        2
    } else {
        let geo = Geometric::new(1.0 / (p.avg_nodes - 1.0)).expect("probability in (0, 1]");
        2 + geo.sample(&mut rng) as usize
    };
    let attachment = if p.structural_signal && label == FAKE {
        Attachment::Preferential
    } else {
        p.attachment
    };
    let edges = generate_tree(n, attachment, &mut rng);
    let sign = if label == FAKE { 1.0 } else { -1.0 };
    let x = (0..n)
        .map(|v| {
            let shift = sign * p.separation * if v == 0 { 2.0 } else { 1.0 };
            direction
                .iter()
                .map(|&u| rng.sample::<f64, _>(StandardNormal) + shift * u)
                .collect()
        })
        .collect();
    PropagationGraph {
        id: format!("g{:06}", index + 1),
        label,
        n,
        edges,
        x,
    }
}

/// Labels alternate real/fake, so exactly ⌊num_graphs/2⌋ graphs are fake.
pub fn generate_dataset(p: &GenParams) -> Result<Dataset> {
    p.validate()?;
    let direction = unit_direction(p.feature_dim, p.seed);
    let graphs = (0..p.num_graphs).map(|i| generate_graph(p, i, &direction)).collect();
    Dataset::new(p.name.clone(), graphs, true)
}

pub fn metadata(p: &GenParams, ds: &Dataset) -> GenMetadata {
    GenMetadata {
        params: p.clone(),
        totals: ds.stats(),
    }
}
