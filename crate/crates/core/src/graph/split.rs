use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::seed;

/// Explicit train/test id lists, overriding random splitting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitFile {
    pub train: Vec<String>,
    pub test: Vec<String>,
}

/// Seeded shuffle of `0..n`; the first `⌊fraction·n⌋` go to train. Each side
/// is returned in ascending index order.
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must lie in (0, 1], got {train_fraction}"
        )));
    }
    if n == 0 {
        return Err(Error::Empty("dataset"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng_for(seed, "split"));
    // guard against 0.29 * 100 = 28.999...
    let n_train = ((train_fraction * n as f64) + 1e-9).floor() as usize;
    let n_train = n_train.min(n);
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split_dataset(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(ds.len(), train_fraction, seed)?;
    let pick = |idx: &[usize]| idx.iter().map(|&i| ds.graphs[i].clone()).collect();
    Ok((
        ds.subset(format!("{}-train", ds.name), pick(&train)),
        ds.subset(format!("{}-test", ds.name), pick(&test)),
    ))
}

/// Partitions `ds` by the ids listed in `split`. Every id must exist and no id
/// may appear on both sides.
pub fn apply_split(ds: &Dataset, split: &SplitFile) -> Result<(Dataset, Dataset)> {
    let by_id: HashMap<&str, usize> = ds.graphs.iter().enumerate().map(|(i, g)| (g.id.as_str(), i)).collect();
    let train_ids: HashSet<&str> = split.train.iter().map(String::as_str).collect();
    if let Some(dup) = split.test.iter().find(|id| train_ids.contains(id.as_str())) {
        return Err(Error::InvalidArgument(format!(
            "id {dup} listed in both train and test"
        )));
    }
    let pick = |ids: &[String]| -> Result<Vec<_>> {
        ids.iter()
            .map(|id| {
                by_id
                    .get(id.as_str())
                    .map(|&i| ds.graphs[i].clone())
                    .ok_or_else(|| Error::InvalidArgument(format!("split id {id} not in dataset")))
            })
            .collect()
    };
    Ok((
        ds.subset(format!("{}-train", ds.name), pick(&split.train)?),
        ds.subset(format!("{}-test", ds.name), pick(&split.test)?),
    ))
}

pub fn load_split(path: impl AsRef<Path>) -> Result<SplitFile> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn save_split(split: &SplitFile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, serde_json::to_string(split)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PropagationGraph;

    fn dataset(n: usize) -> Dataset {
        let graphs = (0..n)
            .map(|i| PropagationGraph {
                id: format!("g{i:04}"),
                label: (i % 2) as u8,
                n: 1,
                edges: vec![],
                x: vec![vec![i as f64]],
            })
            .collect();
        Dataset::new("d", graphs, true).unwrap()
    }

    #[test]
    fn eighty_twenty_of_four_hundred() {
        let (tr, te) = split_dataset(&dataset(400), 0.8, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (320, 80));
    }

    #[test]
    fn full_fraction_keeps_everything_in_train() {
        let (tr, te) = split_dataset(&dataset(10), 1.0, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (10, 0));
    }

    #[test]
    fn same_seed_same_partition() {
        let ds = dataset(50);
        let ids = |d: &Dataset| d.graphs.iter().map(|g| g.id.clone()).collect::<Vec<_>>();
        let (a, _) = split_dataset(&ds, 0.8, 9).unwrap();
        let (b, _) = split_dataset(&ds, 0.8, 9).unwrap();
        let (c, _) = split_dataset(&ds, 0.8, 10).unwrap();
        assert_eq!(ids(&a), ids(&b));
        assert_ne!(ids(&a), ids(&c));
    }

    #[test]
    fn bad_fraction_and_empty_rejected() {
        assert!(split_indices(10, 0.0, 1).is_err());
        assert!(split_indices(10, 1.5, 1).is_err());
        assert!(split_indices(0, 0.8, 1).is_err());
    }

    #[test]
    fn explicit_split_file() {
        let ds = dataset(4);
        let split = SplitFile {
            train: vec!["g0003".into(), "g0000".into()],
            test: vec!["g0001".into()],
        };
        let (tr, te) = apply_split(&ds, &split).unwrap();
        assert_eq!(tr.graphs[0].id, "g0003");
        assert_eq!(te.len(), 1);
        let bad = SplitFile {
            train: vec!["nope".into()],
            test: vec![],
        };
        assert!(apply_split(&ds, &bad).is_err());
        let overlap = SplitFile {
            train: vec!["g0001".into()],
            test: vec!["g0001".into()],
        };
        assert!(apply_split(&ds, &overlap).is_err());
    }

    proptest::proptest! {
        #[test]
        fn split_partitions(n in 1usize..200, frac in 0.05f64..=1.0, seed in 0u64..1000) {
            let (tr, te) = split_indices(n, frac, seed).unwrap();
            proptest::prop_assert_eq!(tr.len() + te.len(), n);
            let all: HashSet<usize> = tr.iter().chain(&te).copied().collect();
            proptest::prop_assert_eq!(all.len(), n);
        }
    }
}
