//! Bagged decision trees.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{fit_weighted, DecisionTree, MaxFeatures, TreeParams};
use super::{check_xy, Classifier, DocMatrix};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub tree: TreeParams,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            tree: TreeParams {
                max_depth: None,
                min_samples_split: 2,
                max_features: MaxFeatures::Sqrt,
            },
            bootstrap: true,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub fn votes(&self, row: &[(usize, f64)]) -> [usize; 2] {
        let mut v = [0; 2];
        for t in &self.trees {
            v[t.predict_row(row)] += 1;
        }
        v
    }
}

impl Classifier for RandomForest {
    /// Majority vote; ties go to class 0.
    fn predict_row(&self, row: &[(usize, f64)]) -> usize {
        let v = self.votes(row);
        usize::from(v[1] > v[0])
    }
}

/// Tree `t` draws its bootstrap sample and feature subsets from its own
/// stream of `seed`, so results do not depend on training order.
pub fn train_random_forest(x: &DocMatrix, y: &[usize], p: &ForestParams) -> Result<RandomForest> {
    check_xy(x, y)?;
    if p.n_trees == 0 {
        return Err(Error::InvalidArgument("n_trees must be positive".into()));
    }
    let n = y.len();
    let trees = (0..p.n_trees)
        .map(|t| {
            let mut rng = seed::rng_indexed(p.seed, "tree", t as u64);
            let mut weights = vec![0usize; n];
            if p.bootstrap {
                for _ in 0..n {
                    weights[rng.random_range(0..n)] += 1;
                }
            } else {
                weights.fill(1);
            }
            fit_weighted(x, y, weights, &p.tree, Some(&mut rng))
        })
        .collect::<Result<_>>()?;
    Ok(RandomForest { trees })
}
