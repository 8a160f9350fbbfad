mod support;

use fnbench_core::baselines::*;
use rand::Rng;
use support::rng;

fn xor() -> (DocMatrix, Vec<usize>) {
    (
        DocMatrix::from_dense(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]),
        vec![0, 1, 1, 0],
    )
}

/// Two point clouds with a margin of at least 1 around `x0 + x1 = 0`.
fn separable(seed: u64) -> (DocMatrix, Vec<usize>) {
    let mut r = rng(seed);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..60 {
        let class = i % 2;
        let sign = if class == 1 { 1.0 } else { -1.0 };
        let along: f64 = r.random_range(-3.0..3.0);
        let off: f64 = r.random_range(1.0..3.0) * std::f64::consts::SQRT_2;
        rows.push([along + sign * off / 2.0, -along + sign * off / 2.0]);
        y.push(class);
    }
    (DocMatrix::from_dense(&rows), y)
}

#[test]
fn depth_limited_gini_tree_solves_xor() {
    let (x, y) = xor();
    let t = train_decision_tree(&x, &y, &TreeParams::default()).unwrap();
    assert!(t.root.depth() <= 4);
    assert_eq!(evaluate_baseline(&t, &x, &y).unwrap().accuracy(), 1.0);
}

#[test]
fn linear_models_fit_a_margin_one_toy() {
    for seed in 0..3 {
        let (x, y) = separable(seed);
        let lr = train_logreg(&x, &y, &LinearParams::default()).unwrap();
        assert_eq!(
            evaluate_baseline(&lr, &x, &y).unwrap().accuracy(),
            1.0,
            "logreg seed {seed}"
        );
        let svm = train_svm(&x, &y, &LinearParams::default()).unwrap();
        assert_eq!(
            evaluate_baseline(&svm, &x, &y).unwrap().accuracy(),
            1.0,
            "svm seed {seed}"
        );
    }
}

#[test]
fn forest_prediction_is_member_majority() {
    let (x, y) = separable(4);
    let f = train_random_forest(
        &x,
        &y,
        &ForestParams {
            n_trees: 25,
            ..ForestParams::default()
        },
    )
    .unwrap();
    let mut r = rng(9);
    for _ in 0..500 {
        let probe = vec![(0, r.random_range(-4.0..4.0)), (1, r.random_range(-4.0..4.0))];
        let ones = f.trees.iter().filter(|t| t.predict_row(&probe) == 1).count();
        let expected = usize::from(ones * 2 > f.trees.len());
        assert_eq!(f.predict_row(&probe), expected);
    }
}

#[test]
fn text_pipeline_end_to_end() {
    let texts = [
        ("a", 1, "SHOCKING: aliens built the pyramids!!!"),
        ("b", 0, "The senate passed the budget bill on Tuesday."),
        ("c", 1, "Shocking truth about aliens they hide"),
        ("d", 0, "Budget committee reviews the senate proposal"),
    ];
    let records: Vec<TextRecord> = texts
        .iter()
        .map(|&(id, label, text)| TextRecord {
            id: id.into(),
            label,
            text: text.into(),
        })
        .collect();
    let docs: Vec<Vec<String>> = records.iter().map(|r| tokenize(&r.text, stop_words())).collect();
    let y: Vec<usize> = records.iter().map(|r| r.label as usize).collect();
    let vocab = fit_vocabulary(&docs, DEFAULT_MAX_VOCAB).unwrap();
    assert!(vocab.column("the").is_none());
    assert!(vocab.column("shocking").is_some());
    let x = vectorize(&docs, &vocab);
    for kind in BaselineKind::ALL {
        let cfg = BaselineConfig {
            forest: ForestParams {
                n_trees: 11,
                ..ForestParams::default()
            },
            ..BaselineConfig::default()
        };
        let m = train_baseline(kind, &x, &y, &cfg).unwrap();
        assert_eq!(evaluate_baseline(&m, &x, &y).unwrap().accuracy(), 1.0, "{kind}");
    }
}
