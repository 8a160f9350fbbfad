//! CART decision trees with Gini impurity.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_xy, Classifier, DocMatrix};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    #[default]
    All,
    /// `max(1, floor(√d))` candidate features per split.
    Sqrt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: Some(4),
            min_samples_split: 2,
            max_features: MaxFeatures::All,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        class: usize,
        counts: [usize; 2],
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        counts: [usize; 2],
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.leaves() + right.leaves(),
        }
    }

    pub fn counts(&self) -> [usize; 2] {
        match self {
            TreeNode::Leaf { counts, .. } | TreeNode::Split { counts, .. } => *counts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
    pub n_features: usize,
}

fn lookup(row: &[(usize, f64)], feature: usize) -> f64 {
    row.binary_search_by_key(&feature, |&(c, _)| c)
        .map_or(0.0, |i| row[i].1)
}

impl Classifier for DecisionTree {
    fn predict_row(&self, row: &[(usize, f64)]) -> usize {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { class, .. } => return *class,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    node = if lookup(row, *feature) <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }
}

pub fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = counts[0] as f64 / n;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

fn majority(counts: [usize; 2]) -> usize {
    usize::from(counts[1] > counts[0])
}

/// Column-major copy of the nonzeros, used to enumerate split points.
struct Columns {
    cols: Vec<Vec<(usize, f64)>>,
}

impl Columns {
    fn new(x: &DocMatrix) -> Self {
        let mut cols = vec![Vec::new(); x.n_cols];
        for (r, row) in x.rows.iter().enumerate() {
            for &(c, v) in row {
                cols[c].push((r, v));
            }
        }
        Self { cols }
    }
}

struct Candidate {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

const TIE_EPS: f64 = 1e-12;

struct Builder<'a, R> {
    x: &'a DocMatrix,
    y: &'a [usize],
    columns: Columns,
    params: TreeParams,
    rng: Option<&'a mut R>,
}

impl<R: Rng> Builder<'_, R> {
    /// `weight[r]` is how often row `r` appears in the sample (bootstrap duplicates).
    fn best_split(&mut self, weight: &[usize], counts: [usize; 2]) -> Option<Candidate> {
        let total = counts[0] + counts[1];
        let mut features: Vec<usize> = (0..self.x.n_cols).collect();
        let limit = match self.params.max_features {
            MaxFeatures::All => features.len(),
            MaxFeatures::Sqrt => ((features.len() as f64).sqrt().floor() as usize).max(1),
        };
        if limit < features.len() {
            if let Some(rng) = self.rng.as_deref_mut() {
                features.shuffle(rng);
            }
        }
        let mut best: Option<Candidate> = None;
        let mut visited = 0;
        let mut values: Vec<(f64, [usize; 2])> = Vec::new();
        for &f in &features {
            // keep drawing past constant features, as long as any remain
            if visited >= limit && best.is_some() {
                break;
            }
            values.clear();
            let mut nonzero = [0usize; 2];
            for &(r, v) in &self.columns.cols[f] {
                let w = weight[r];
                if w > 0 {
                    let mut c = [0; 2];
                    c[self.y[r]] = w;
                    nonzero[self.y[r]] += w;
                    values.push((v, c));
                }
            }
            let zeros = [counts[0] - nonzero[0], counts[1] - nonzero[1]];
            if zeros[0] + zeros[1] > 0 {
                values.push((0.0, zeros));
            }
            values.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            // merge equal values
            let mut merged: Vec<(f64, [usize; 2])> = Vec::with_capacity(values.len());
            for &(v, c) in &values {
                match merged.last_mut() {
                    Some(last) if last.0 == v => {
                        last.1[0] += c[0];
                        last.1[1] += c[1];
                    }
                    _ => merged.push((v, c)),
                }
            }
            if merged.len() < 2 {
                continue;
            }
            visited += 1;
            let mut left = [0usize; 2];
            for k in 0..merged.len() - 1 {
                left[0] += merged[k].1[0];
                left[1] += merged[k].1[1];
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let nl = (left[0] + left[1]) as f64;
                let nr = (right[0] + right[1]) as f64;
                let impurity = (nl * gini(left) + nr * gini(right)) / total as f64;
                let threshold = 0.5 * (merged[k].0 + merged[k + 1].0);
                let better = match &best {
                    None => true,
                    Some(b) => {
                        impurity < b.impurity - TIE_EPS
                            || (impurity <= b.impurity + TIE_EPS && (f, threshold) < (b.feature, b.threshold))
                    }
                };
                if better {
                    best = Some(Candidate {
                        impurity,
                        feature: f,
                        threshold,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: Vec<usize>, weight: &mut [usize], depth: usize) -> TreeNode {
        let mut counts = [0usize; 2];
        for &r in &rows {
            counts[self.y[r]] += weight[r];
        }
        let total = counts[0] + counts[1];
        let leaf = TreeNode::Leaf {
            class: majority(counts),
            counts,
        };
        if counts[0] == 0
            || counts[1] == 0
            || total < self.params.min_samples_split
            || self.params.max_depth.is_some_and(|d| depth >= d)
        {
            return leaf;
        }
        let Some(split) = self.best_split(weight, counts) else {
            return leaf;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| lookup(&self.x.rows[r], split.feature) <= split.threshold);
        // children see only their own rows
        let saved: Vec<usize> = right.iter().map(|&r| std::mem::take(&mut weight[r])).collect();
        let left_node = self.grow(left.clone(), weight, depth + 1);
        for (&r, w) in right.iter().zip(saved) {
            weight[r] = w;
        }
        let saved: Vec<usize> = left.iter().map(|&r| std::mem::take(&mut weight[r])).collect();
        let right_node = self.grow(right, weight, depth + 1);
        for (&r, w) in left.iter().zip(saved) {
            weight[r] = w;
        }
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            counts,
            left: Box::new(left_node),
            right: Box::new(right_node),
        }
    }
}

pub fn train_decision_tree(x: &DocMatrix, y: &[usize], params: &TreeParams) -> Result<DecisionTree> {
    check_xy(x, y)?;
    let weights = vec![1; y.len()];
    fit_weighted::<rand_chacha::ChaCha8Rng>(x, y, weights, params, None)
}

/// Fits on rows with multiplicities `weights`; `rng` drives feature subsampling.
pub(crate) fn fit_weighted<R: Rng>(
    x: &DocMatrix,
    y: &[usize],
    mut weights: Vec<usize>,
    params: &TreeParams,
    rng: Option<&mut R>,
) -> Result<DecisionTree> {
    let rows: Vec<usize> = (0..y.len()).filter(|&r| weights[r] > 0).collect();
    let mut b = Builder {
        x,
        y,
        columns: Columns::new(x),
        params: *params,
        rng,
    };
    let root = b.grow(rows, &mut weights, 0);
    Ok(DecisionTree {
        root,
        n_features: x.n_cols,
    })
}
