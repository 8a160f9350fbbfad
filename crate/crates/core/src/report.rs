//! Run reports: per-epoch curves plus final accuracies, as CSV, and the
//! markdown comparison table built from several reports.
//!
//! ```text
//! epoch,train_loss,train_acc,test_acc
//! 1,0.69,0.55,0.5
//! # config,{"model":"gcn",...}
//! # final,<train_acc>,<test_acc>,<seconds>
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "epoch,train_loss,train_acc,test_acc";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    /// `None` when the test split is empty.
    pub test_acc: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    pub final_train_acc: f64,
    pub final_test_acc: Option<f64>,
    pub seconds: f64,
    /// Echo of the run configuration; `model` and `dataset` keys label the run.
    pub config: serde_json::Value,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl TrainReport {
    pub fn model_name(&self) -> &str {
        self.config.get("model").and_then(|v| v.as_str()).unwrap_or("?")
    }

    pub fn dataset_name(&self) -> &str {
        self.config.get("dataset").and_then(|v| v.as_str()).unwrap_or("?")
    }

    /// Serializes the report. `seconds` is written verbatim; callers that
    /// need byte-identical files pass a report with `seconds = 0`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(CSV_HEADER);
        s.push('\n');
        for e in &self.epochs {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                e.epoch,
                e.train_loss,
                e.train_acc,
                fmt_opt(e.test_acc)
            );
        }
        let _ = writeln!(s, "# config,{}", self.config);
        let _ = writeln!(
            s,
            "# final,{},{},{}",
            self.final_train_acc,
            fmt_opt(self.final_test_acc),
            self.seconds
        );
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == CSV_HEADER => {}
            _ => return Err(bad(1, format!("expected header `{CSV_HEADER}`"))),
        }
        let num = |i: usize, s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| bad(i + 1, format!("bad number {s:?}: {e}")))
        };
        let opt = |i: usize, s: &str| -> Result<Option<f64>> {
            if s.trim().is_empty() {
                Ok(None)
            } else {
                num(i, s).map(Some)
            }
        };

        let mut epochs = Vec::new();
        let mut config = serde_json::Value::Null;
        let mut fin = None;
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# config,") {
                config = serde_json::from_str(rest).map_err(|e| bad(i + 1, e.to_string()))?;
            } else if let Some(rest) = line.strip_prefix("# final,") {
                let f: Vec<&str> = rest.split(',').collect();
                if f.len() != 3 {
                    return Err(bad(i + 1, "final line needs 3 fields".into()));
                }
                fin = Some((num(i, f[0])?, opt(i, f[1])?, num(i, f[2])?));
            } else if line.starts_with('#') {
                continue;
            } else {
                let f: Vec<&str> = line.split(',').collect();
                if f.len() != 4 {
                    return Err(bad(i + 1, format!("expected 4 fields, got {}", f.len())));
                }
                let epoch = f[0]
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| bad(i + 1, format!("bad epoch: {e}")))?;
                if epoch != epochs.len() + 1 {
                    return Err(bad(i + 1, format!("epoch {epoch} out of sequence")));
                }
                epochs.push(EpochRecord {
                    epoch,
                    train_loss: num(i, f[1])?,
                    train_acc: num(i, f[2])?,
                    test_acc: opt(i, f[3])?,
                });
            }
        }
        let (final_train_acc, final_test_acc, seconds) =
            fin.ok_or_else(|| bad(text.lines().count(), "missing `# final` line".into()))?;
        Ok(Self {
            epochs,
            final_train_acc,
            final_test_acc,
            seconds,
            config,
        })
    }
}

fn pct(v: Option<f64>) -> String {
    v.map(|x| format!("{:.2}", 100.0 * x)).unwrap_or_else(|| "–".into())
}

/// One row per model, one Train/Test column pair per dataset, in first-seen order.
pub fn markdown_table(reports: &[TrainReport]) -> String {
    let mut datasets: Vec<String> = Vec::new();
    let mut models: Vec<String> = Vec::new();
    let mut cells: BTreeMap<(String, String), (f64, Option<f64>)> = BTreeMap::new();
    for r in reports {
        let (m, d) = (r.model_name().to_string(), r.dataset_name().to_string());
        if !models.contains(&m) {
            models.push(m.clone());
        }
        if !datasets.contains(&d) {
            datasets.push(d.clone());
        }
        cells.insert((m, d), (r.final_train_acc, r.final_test_acc));
    }

    let mut s = String::from("| Model |");
    for d in &datasets {
        let _ = write!(s, " {d} Train Accuracy | {d} Test Accuracy |");
    }
    s.push_str("\n|---|");
    s.push_str(&"---|---|".repeat(datasets.len()));
    s.push('\n');
    for m in &models {
        let _ = write!(s, "| {m} |");
        for d in &datasets {
            match cells.get(&(m.clone(), d.clone())) {
                Some(&(tr, te)) => {
                    let _ = write!(s, " {} | {} |", pct(Some(tr)), pct(te));
                }
                None => s.push_str(" – | – |"),
            }
        }
        s.push('\n');
    }
    s
}

/// All epoch rows of all reports, labeled by model and dataset.
pub fn curves_csv(reports: &[TrainReport]) -> String {
    let mut s = format!("model,dataset,{CSV_HEADER}\n");
    for r in reports {
        for e in &r.epochs {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.model_name(),
                r.dataset_name(),
                e.epoch,
                e.train_loss,
                e.train_acc,
                fmt_opt(e.test_acc)
            );
        }
    }
    s
}
