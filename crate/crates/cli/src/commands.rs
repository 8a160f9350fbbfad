use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use fnbench_core::baselines::save_corpus;
use fnbench_core::baselines::{
    evaluate_baseline, fit_vocabulary, load_corpus, stop_words, tokenize, train_baseline, vectorize, BaselineConfig,
    BaselineKind, ForestParams, LinearParams, TreeParams,
};
use fnbench_core::graph::{
    apply_split, load_dataset, load_split, save_dataset, save_split, split_dataset, split_indices, SplitFile,
};
use fnbench_core::layers::SageAggregator;
use fnbench_core::model::{train_gnn, LayerKind, ModelConfig, TrainConfig};
use fnbench_core::numeric::Activation;
use fnbench_core::report::{curves_csv, markdown_table, TrainReport};
use fnbench_core::synth::{generate_dataset, metadata, root_corpus, Attachment, GenParams};
use fnbench_core::Error;
use serde_json::json;

use crate::args::*;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

/// An error together with the process exit code it maps to.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }

    fn context(mut self, what: impl fmt::Display + Send + Sync + 'static) -> Self {
        self.error = self.error.context(what);
        self
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) | Error::InvalidArgument(_) => EXIT_USAGE,
            Error::NonFinite(_) | Error::Diverged { .. } => EXIT_NUMERIC,
            _ => EXIT_DATA,
        };
        Self::new(code, e)
    }
}

type Outcome = Result<(), Failure>;

fn with_path<T>(r: fnbench_core::Result<T>, path: &Path) -> Result<T, Failure> {
    r.map_err(|e| Failure::from(e).context(path.display().to_string()))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure::new(EXIT_USAGE, e).context(format!("writing {}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned())
}

pub fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::TrainGnn(a) => train_gnn_cmd(a),
        Command::TrainBaseline(a) => train_baseline_cmd(a),
        Command::Report(a) => report(a),
    }
}

fn generate(a: GenerateArgs) -> Outcome {
    let params = GenParams {
        num_graphs: a.graphs as usize,
        avg_nodes: a.avg_nodes,
        feature_dim: a.dim as usize,
        separation: a.sep,
        attachment: match a.attachment {
            AttachmentArg::Uniform => Attachment::Uniform,
            AttachmentArg::Preferential => Attachment::Preferential,
        },
        structural_signal: a.structural_signal,
        seed: a.common.seed,
        name: a.name,
    };
    let ds = generate_dataset(&params)?;
    with_path(save_dataset(&ds, &a.out), &a.out)?;
    let meta_path = a.meta_out.unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".meta.json");
        PathBuf::from(p)
    });
    let meta = serde_json::to_string_pretty(&metadata(&params, &ds)).map_err(|e| Failure::new(EXIT_DATA, e))?;
    write_file(&meta_path, meta + "\n")?;
    if let Some(path) = &a.corpus_out {
        with_path(save_corpus(&root_corpus(&ds, params.seed), path), path)?;
    }
    let s = ds.stats();
    println!(
        "graphs={} fake={} real={} nodes={} edges={} out={}",
        s.graphs,
        s.fake,
        s.graphs - s.fake,
        s.nodes,
        s.edges,
        a.out.display()
    );
    Ok(())
}

fn fmt_acc(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |x| format!("{x:.4}"))
}

fn train_gnn_cmd(a: TrainGnnArgs) -> Outcome {
    let seed = a.common.seed;
    let mut ds = with_path(load_dataset(&a.data, !a.no_tree_mode), &a.data)?;
    if let Some(name) = &a.dataset_name {
        ds.name = name.clone();
    }
    let (train, test) = match &a.split.split {
        Some(path) => apply_split(&ds, &with_path(load_split(path), path)?)?,
        None => split_dataset(&ds, a.split.train_fraction, seed)?,
    };
    if let Some(path) = &a.split.split_out {
        let ids = |d: &fnbench_core::graph::Dataset| d.graphs.iter().map(|g| g.id.clone()).collect();
        with_path(
            save_split(
                &SplitFile {
                    train: ids(&train),
                    test: ids(&test),
                },
                path,
            ),
            path,
        )?;
    }

    let layer = match a.layer {
        LayerArg::Gcn => LayerKind::Gcn,
        LayerArg::Gat => LayerKind::Gat,
        LayerArg::Sage => LayerKind::Sage,
        LayerArg::Gin => LayerKind::Gin,
    };
    let config = ModelConfig {
        layers: a.layers as usize,
        hidden: a.hidden as usize,
        heads: a.heads as usize,
        gat_activation: match a.gat_activation {
            ActivationArg::Elu => Activation::Elu,
            ActivationArg::Relu => Activation::Relu,
            ActivationArg::Identity => Activation::Identity,
        },
        sage_aggregator: match a.sage_aggregator {
            SageAggregatorArg::Mean => SageAggregator::Mean,
            SageAggregatorArg::Maxpool => SageAggregator::MaxPool,
        },
        learn_eps: a.learn_eps,
        symmetrize: !a.directed,
        self_loops: a.self_loops,
        conv_bias: a.conv_bias,
        seed,
        ..ModelConfig::new(layer)
    };
    let train_cfg = TrainConfig {
        epochs: a.epochs as usize,
        batch_size: a.batch_size as usize,
        lr: a.lr,
    };
    let (_, mut report) = train_gnn::<f64>(config, &train_cfg, &train, &test)?;
    if !a.timing {
        report.seconds = 0.0;
    }
    if let Some(obj) = report.config.as_object_mut() {
        obj.insert("seed".into(), json!(seed));
        obj.insert("train_graphs".into(), json!(train.len()));
        obj.insert("test_graphs".into(), json!(test.len()));
    }
    let out = a
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", layer.as_str())));
    write_file(&out, report.to_csv())?;
    println!(
        "layer={} train_acc={} test_acc={}",
        layer.as_str(),
        fmt_acc(Some(report.final_train_acc)),
        fmt_acc(report.final_test_acc)
    );
    Ok(())
}

fn train_baseline_cmd(a: TrainBaselineArgs) -> Outcome {
    let seed = a.common.seed;
    let records = with_path(load_corpus(&a.corpus), &a.corpus)?;
    let (train_idx, test_idx) = match &a.split.split {
        Some(path) => {
            let split = with_path(load_split(path), path)?;
            let pos: HashMap<&str, usize> = records.iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect();
            let lookup = |ids: &[String]| -> Result<Vec<usize>, Failure> {
                ids.iter()
                    .map(|id| {
                        pos.get(id.as_str())
                            .copied()
                            .ok_or_else(|| Failure::new(EXIT_DATA, anyhow!("split id {id:?} is not in the corpus")))
                    })
                    .collect()
            };
            (lookup(&split.train)?, lookup(&split.test)?)
        }
        None => split_indices(records.len(), a.split.train_fraction, seed)?,
    };
    if let Some(path) = &a.split.split_out {
        let ids = |idx: &[usize]| idx.iter().map(|&i| records[i].id.clone()).collect();
        with_path(
            save_split(
                &SplitFile {
                    train: ids(&train_idx),
                    test: ids(&test_idx),
                },
                path,
            ),
            path,
        )?;
    }

    let docs: Vec<Vec<String>> = records.iter().map(|r| tokenize(&r.text, stop_words())).collect();
    let pick_docs = |idx: &[usize]| idx.iter().map(|&i| docs[i].clone()).collect::<Vec<_>>();
    let pick_y = |idx: &[usize]| idx.iter().map(|&i| usize::from(records[i].label)).collect::<Vec<_>>();
    let (train_docs, test_docs) = (pick_docs(&train_idx), pick_docs(&test_idx));
    let (y_train, y_test) = (pick_y(&train_idx), pick_y(&test_idx));
    let vocab = fit_vocabulary(&train_docs, a.max_vocab as usize)?;
    let x_train = vectorize(&train_docs, &vocab);
    let x_test = vectorize(&test_docs, &vocab);

    let kind = match a.model {
        BaselineArg::Logreg => BaselineKind::Logreg,
        BaselineArg::Svm => BaselineKind::Svm,
        BaselineArg::Dtree => BaselineKind::Dtree,
        BaselineArg::Rforest => BaselineKind::Rforest,
    };
    let defaults = BaselineConfig::default();
    let cfg = BaselineConfig {
        linear: LinearParams {
            seed,
            ..defaults.linear
        },
        tree: TreeParams {
            max_depth: Some(a.max_depth as usize),
            ..defaults.tree
        },
        forest: ForestParams {
            n_trees: a.n_trees as usize,
            seed,
            ..defaults.forest
        },
    };
    let model = train_baseline(kind, &x_train, &y_train, &cfg)?;
    let train_acc = evaluate_baseline(&model, &x_train, &y_train)?.accuracy();
    let test_acc = if y_test.is_empty() {
        None
    } else {
        Some(evaluate_baseline(&model, &x_test, &y_test)?.accuracy())
    };

    let dataset = a.dataset_name.unwrap_or_else(|| stem(&a.corpus));
    let report = TrainReport {
        epochs: Vec::new(),
        final_train_acc: train_acc,
        final_test_acc: test_acc,
        seconds: 0.0,
        config: json!({
            "model": kind.as_str(),
            "dataset": dataset,
            "seed": seed,
            "vocab_size": vocab.len(),
            "max_vocab": a.max_vocab,
            "train_docs": y_train.len(),
            "test_docs": y_test.len(),
            "params": cfg,
        }),
    };
    if let Some(out) = &a.out {
        write_file(out, report.to_csv())?;
    }
    println!(
        "model={} train_acc={} test_acc={}",
        kind.as_str(),
        fmt_acc(Some(train_acc)),
        fmt_acc(test_acc)
    );
    Ok(())
}

fn report(a: ReportArgs) -> Outcome {
    let reports = a
        .inputs
        .iter()
        .map(|path| {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::new(EXIT_USAGE, e).context(format!("reading {}", path.display())))?;
            with_path(TrainReport::parse(&text), path)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let table = markdown_table(&reports);
    match &a.out {
        Some(out) => write_file(out, &table)?,
        None => print!("{table}"),
    }
    if let Some(out) = &a.curves_out {
        write_file(out, curves_csv(&reports))?;
    }
    Ok(())
}
