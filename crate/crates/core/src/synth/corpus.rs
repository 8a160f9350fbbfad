//! Text rendering of each graph's root features, so text baselines see the
//! same per-article signal as the root node of the GNN input.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::baselines::TextRecord;
use crate::graph::Dataset;
use crate::seed;

const FILLER: &[&str] = &[
    "report",
    "claim",
    "story",
    "source",
    "people",
    "official",
    "statement",
    "video",
    "post",
    "share",
];
const STOP: &[&str] = &["the", "and", "of", "to", "in", "is", "that", "it"];

/// Bijective base-26 name for a feature index: 0 → `a`, 25 → `z`, 26 → `aa`.
pub fn token_for_dim(mut j: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (j % 26) as u8);
        if j < 26 {
            break;
        }
        j = j / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii letters")
}

/// Each root coordinate `x_j` becomes `round(2|x_j|)` copies of `up<j>` or
/// `down<j>` by sign, mixed with filler and stop words in a seeded order.
pub fn root_corpus(ds: &Dataset, seed: u64) -> Vec<TextRecord> {
    ds.graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut rng = seed::rng_indexed(seed, "corpus", i as u64);
            let mut words: Vec<String> = Vec::new();
            for (j, &v) in g.x[0].iter().enumerate() {
                let reps = (2.0 * v.abs()).round() as usize;
                let prefix = if v >= 0.0 { "up" } else { "down" };
                let tok = format!("{prefix}{}", token_for_dim(j));
                words.extend(std::iter::repeat_n(tok, reps));
            }
            for _ in 0..rng.random_range(3..8) {
                words.push(FILLER[rng.random_range(0..FILLER.len())].to_string());
                words.push(STOP[rng.random_range(0..STOP.len())].to_string());
            }
            words.shuffle(&mut rng);
            TextRecord {
                id: g.id.clone(),
                label: g.label,
                text: words.join(" "),
            }
        })
        .collect()
}
