//! Bag-of-words classifiers over article text.

mod forest;
mod linear;
mod text;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use forest::{train_random_forest, ForestParams, RandomForest};
pub use linear::{svm_objective, train_logreg, train_svm, train_svm_traced, LinearKind, LinearModel, LinearParams};
pub use text::{
    fit_vocabulary, load_corpus, read_corpus, save_corpus, stop_words, tokenize, vectorize, write_corpus, DocMatrix,
    TextRecord, Vocabulary, DEFAULT_MAX_VOCAB,
};
pub use tree::{gini, train_decision_tree, DecisionTree, MaxFeatures, TreeNode, TreeParams};

use crate::error::{Error, Result};
use crate::model::Evaluation;

pub trait Classifier {
    fn predict_row(&self, row: &[(usize, f64)]) -> usize;

    fn predict(&self, x: &DocMatrix) -> Vec<usize> {
        x.rows.iter().map(|r| self.predict_row(r)).collect()
    }
}

pub fn evaluate_baseline<C: Classifier + ?Sized>(model: &C, x: &DocMatrix, y: &[usize]) -> Result<Evaluation> {
    check_xy(x, y)?;
    Evaluation::from_predictions(y, &model.predict(x))
}

pub(crate) fn check_xy(x: &DocMatrix, y: &[usize]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::Empty("training rows"));
    }
    if x.n_rows() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "{} rows but {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    if let Some((row, &label)) = y.iter().enumerate().find(|(_, &l)| l > 1) {
        return Err(Error::LabelOutOfRange { row, label });
    }
    Ok(())
}

pub(crate) fn dot(row: &[(usize, f64)], w: &[f64]) -> f64 {
    row.iter().map(|&(c, v)| v * w[c]).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    Logreg,
    Svm,
    Dtree,
    Rforest,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 4] = [Self::Logreg, Self::Svm, Self::Dtree, Self::Rforest];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Logreg => "logreg",
            Self::Svm => "svm",
            Self::Dtree => "dtree",
            Self::Rforest => "rforest",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown model {s:?}; expected one of logreg, svm, dtree, rforest"
            ))
        })
    }
}

/// Any fitted baseline.
#[derive(Clone, Debug, PartialEq)]
pub enum Baseline {
    Linear(LinearModel),
    Tree(DecisionTree),
    Forest(RandomForest),
}

impl Classifier for Baseline {
    fn predict_row(&self, row: &[(usize, f64)]) -> usize {
        match self {
            Baseline::Linear(m) => m.predict_row(row),
            Baseline::Tree(m) => m.predict_row(row),
            Baseline::Forest(m) => m.predict_row(row),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub linear: LinearParams,
    pub tree: TreeParams,
    pub forest: ForestParams,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            linear: LinearParams::default(),
            tree: TreeParams::default(),
            forest: ForestParams::default(),
        }
    }
}

pub fn train_baseline(kind: BaselineKind, x: &DocMatrix, y: &[usize], cfg: &BaselineConfig) -> Result<Baseline> {
    Ok(match kind {
        BaselineKind::Logreg => Baseline::Linear(train_logreg(x, y, &cfg.linear)?),
        BaselineKind::Svm => Baseline::Linear(train_svm(x, y, &cfg.linear)?),
        BaselineKind::Dtree => Baseline::Tree(train_decision_tree(x, y, &cfg.tree)?),
        BaselineKind::Rforest => Baseline::Forest(train_random_forest(x, y, &cfg.forest)?),
    })
}
