use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Model, ModelConfig, PreparedBatch, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::graph::{batch_graphs, Dataset, PropagationGraph};
use crate::numeric::{adam_step, AdamState, Scalar};
use crate::report::{EpochRecord, TrainReport};
use crate::seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            batch_size: 128,
            lr: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub correct: usize,
    pub total: usize,
    /// `confusion[actual][predicted]`.
    pub confusion: [[usize; NUM_CLASSES]; NUM_CLASSES],
}

impl Evaluation {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }

    pub fn from_predictions(actual: &[usize], predicted: &[usize]) -> Result<Self> {
        if actual.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        let mut confusion = [[0; NUM_CLASSES]; NUM_CLASSES];
        for (&a, &p) in actual.iter().zip(predicted) {
            confusion[a][p] += 1;
        }
        Ok(Self {
            correct: confusion[0][0] + confusion[1][1],
            total: actual.len(),
            confusion,
        })
    }
}

/// Predicted class of each logits row; ties go to class 0.
pub(crate) fn argmax_rows<T: Scalar>(logits: &crate::numeric::DenseMatrix<T>) -> Vec<usize> {
    logits.iter_rows().map(|r| usize::from(r[1] > r[0])).collect()
}

fn prepare_all<T: Scalar>(
    m: &Model<T>,
    graphs: &[&PropagationGraph],
    batch_size: usize,
) -> Result<Vec<PreparedBatch<T>>> {
    graphs
        .chunks(batch_size)
        .map(|chunk| Ok(m.prepare(batch_graphs(chunk)?)))
        .collect()
}

pub fn evaluate_batches<T: Scalar>(m: &Model<T>, batches: &[PreparedBatch<T>]) -> Result<Evaluation> {
    let mut actual = Vec::new();
    let mut predicted = Vec::new();
    for b in batches {
        actual.extend_from_slice(&b.batch.labels);
        predicted.extend(argmax_rows(&m.forward(b)?));
    }
    Evaluation::from_predictions(&actual, &predicted)
}

pub fn evaluate<T: Scalar>(m: &Model<T>, ds: &Dataset) -> Result<Evaluation> {
    let graphs: Vec<&PropagationGraph> = ds.graphs.iter().collect();
    evaluate_batches(m, &prepare_all(m, &graphs, 128)?)
}

/// Mini-batch Adam on mean cross-entropy. Train order is reshuffled every
/// epoch from a stream derived from `model_config.seed`; the last partial
/// batch is kept. Train and test accuracy are measured after every epoch.
pub fn train_gnn<T: Scalar>(
    model_config: ModelConfig,
    train_cfg: &TrainConfig,
    train: &Dataset,
    test: &Dataset,
) -> Result<(Model<T>, TrainReport)> {
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if !test.is_empty() && test.feature_dim != train.feature_dim {
        return Err(Error::Shape {
            op: "train_gnn",
            left: (train.len(), train.feature_dim),
            right: (test.len(), test.feature_dim),
        });
    }
    if train_cfg.epochs == 0 || train_cfg.batch_size == 0 {
        return Err(Error::InvalidArgument("epochs and batch size must be positive".into()));
    }
    let started = Instant::now();
    let seed = model_config.seed;
    let mut model = Model::<T>::init(model_config, train.feature_dim)?;
    let mut adam = AdamState::for_params(&model.params_mut(), T::of(train_cfg.lr));

    let train_graphs: Vec<&PropagationGraph> = train.graphs.iter().collect();
    let test_graphs: Vec<&PropagationGraph> = test.graphs.iter().collect();
    let train_eval = prepare_all(&model, &train_graphs, train_cfg.batch_size)?;
    let test_eval = prepare_all(&model, &test_graphs, train_cfg.batch_size)?;

    let mut rng = seed::rng_for(seed, "shuffle");
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut epochs = Vec::with_capacity(train_cfg.epochs);

    for epoch in 1..=train_cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for (bi, chunk) in order.chunks(train_cfg.batch_size).enumerate() {
            let graphs: Vec<&PropagationGraph> = chunk.iter().map(|&i| train_graphs[i]).collect();
            let prepared = model.prepare(batch_graphs(&graphs)?);
            let (loss, _, grads) = model.loss_and_grads(&prepared)?;
            if !loss.is_finite() || grads.iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged { epoch, batch: bi + 1 });
            }
            loss_sum += loss.as_f64() * chunk.len() as f64;
            adam_step(&mut model.params_mut(), &grads, &mut adam)?;
        }
        let train_acc = evaluate_batches(&model, &train_eval)?.accuracy();
        let test_acc = if test_eval.is_empty() {
            None
        } else {
            Some(evaluate_batches(&model, &test_eval)?.accuracy())
        };
        epochs.push(EpochRecord {
            epoch,
            train_loss: loss_sum / train.len() as f64,
            train_acc,
            test_acc,
        });
    }

    let last = epochs.last().expect("at least one epoch");
    let report = TrainReport {
        final_train_acc: last.train_acc,
        final_test_acc: last.test_acc,
        seconds: started.elapsed().as_secs_f64(),
        config: serde_json::json!({
            "model": model.config.layer.as_str(),
            "dataset": train.name.trim_end_matches("-train"),
            "model_config": model.config,
            "train_config": train_cfg,
        }),
        epochs,
    };
    Ok((model, report))
}
