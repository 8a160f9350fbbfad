//! Tokenization, vocabulary fitting and count vectorization.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const STOP_WORDS: &str = include_str!("stopwords.txt");

pub const DEFAULT_MAX_VOCAB: usize = 20_000;

/// The bundled English stop list.
pub fn stop_words() -> &'static HashSet<String> {
    static WORDS: OnceLock<HashSet<String>> = OnceLock::new();
    WORDS.get_or_init(|| {
        STOP_WORDS
            .lines()
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .map(String::from)
            .collect()
    })
}

/// Lowercases, replaces every non-alphabetic character with a space, splits
/// on whitespace and drops stop words.
pub fn tokenize(text: &str, stopwords: &HashSet<String>) -> Vec<String> {
    let cleaned: String = text
        .to_lowercase()
        .chars()
        .map(|c| if c.is_alphabetic() { c } else { ' ' })
        .collect();
    cleaned
        .split_whitespace()
        .filter(|t| !stopwords.contains(*t))
        .map(String::from)
        .collect()
}

fn is_vocab_token(t: &str) -> bool {
    !t.is_empty() && t.chars().all(|c| c.is_alphabetic() && !c.is_uppercase()) && !stop_words().contains(t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    pub max_vocab: usize,
    pub fitted_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn column(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Tokens in column order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Keeps the `max_vocab` most frequent tokens (ties broken lexicographically);
/// column order follows that ranking.
pub fn fit_vocabulary<D: AsRef<[String]>>(docs: &[D], max_vocab: usize) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::Empty("document list"));
    }
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for d in docs {
        for t in d.as_ref() {
            if is_vocab_token(t) {
                *freq.entry(t.as_str()).or_default() += 1;
            }
        }
    }
    if freq.is_empty() || max_vocab == 0 {
        return Err(Error::InvalidArgument("no usable tokens to build a vocabulary".into()));
    }
    let mut ranked: Vec<(&str, usize)> = freq.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(max_vocab);
    let tokens: Vec<String> = ranked.into_iter().map(|(t, _)| t.to_string()).collect();
    let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(Vocabulary {
        tokens,
        index,
        max_vocab,
        fitted_docs: docs.len(),
    })
}

/// Sparse rows of `(column, value)` sorted by column; zeros are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct DocMatrix {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub n_cols: usize,
}

impl DocMatrix {
    pub fn from_dense<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        Self {
            rows: rows
                .iter()
                .map(|r| {
                    r.as_ref()
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| v != 0.0)
                        .map(|(c, &v)| (c, v))
                        .collect()
                })
                .collect(),
            n_cols,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            n_cols: self.n_cols,
        }
    }
}

/// Counts of in-vocabulary tokens per document.
pub fn vectorize<D: AsRef<[String]>>(docs: &[D], vocab: &Vocabulary) -> DocMatrix {
    let rows = docs
        .iter()
        .map(|d| {
            let mut counts: HashMap<usize, usize> = HashMap::new();
            for t in d.as_ref() {
                if let Some(c) = vocab.column(t) {
                    *counts.entry(c).or_default() += 1;
                }
            }
            let mut row: Vec<(usize, f64)> = counts.into_iter().map(|(c, n)| (c, n as f64)).collect();
            row.sort_unstable_by_key(|&(c, _)| c);
            row
        })
        .collect();
    DocMatrix {
        rows,
        n_cols: vocab.len(),
    }
}

/// One row of the text corpus CSV (`id,label,text`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextRecord {
    pub id: String,
    pub label: u8,
    pub text: String,
}

pub fn read_corpus<R: Read>(reader: R) -> Result<Vec<TextRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["id", "label", "text"] {
        return Err(Error::Parse {
            line: 1,
            message: "expected header id,label,text".into(),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<TextRecord>().enumerate() {
        // data row i sits on line i + 2 for single-line records
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(row + 1, |p| p.line() as usize),
            message: format!("row {row}: {e}"),
        })?;
        if rec.label > 1 {
            return Err(Error::Parse {
                line: row + 1,
                message: format!("row {row}: label {} is not 0 or 1", rec.label),
            });
        }
        out.push(rec);
    }
    if out.is_empty() {
        return Err(Error::Empty("corpus"));
    }
    Ok(out)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<TextRecord>> {
    read_corpus(File::open(path)?)
}

pub fn write_corpus<W: Write>(records: &[TextRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_corpus(records: &[TextRecord], path: impl AsRef<Path>) -> Result<()> {
    write_corpus(records, File::create(path)?)
}
