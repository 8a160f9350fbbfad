use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Dataset, PropagationGraph};
use crate::error::{Error, Result};

/// Reads one JSON object per line. Blank lines are skipped.
pub fn read_dataset<R: BufRead>(reader: R, name: &str, tree_mode: bool) -> Result<Dataset> {
    let mut graphs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let g: PropagationGraph = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        graphs.push(g);
    }
    Dataset::new(name, graphs, tree_mode)
}

pub fn load_dataset(path: impl AsRef<Path>, tree_mode: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_dataset(BufReader::new(File::open(path)?), &name, tree_mode)
}

pub fn write_dataset<W: Write>(ds: &Dataset, mut out: W) -> Result<()> {
    for g in &ds.graphs {
        serde_json::to_writer(&mut out, g)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_dataset(ds, BufWriter::new(File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_line() {
        let line = r#"{"id":"g000001","label":1,"n":3,"edges":[[0,1],[0,2]],"x":[[0.5],[1.0],[-2.0]]}"#;
        let ds = read_dataset(line.as_bytes(), "t", true).unwrap();
        assert_eq!(ds.graphs[0].edges, vec![(0, 1), (0, 2)]);
        assert_eq!(ds.feature_dim, 1);
        assert_eq!(ds.graphs[0].label, 1);
    }

    #[test]
    fn parse_error_carries_line_number() {
        let text = "{\"id\":\"a\",\"label\":0,\"n\":1,\"edges\":[],\"x\":[[1.0]]}\n\n{oops\n";
        match read_dataset(text.as_bytes(), "t", true) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bounds_violation_names_graph() {
        let text = r#"{"id":"bad4","label":0,"n":4,"edges":[[0,1],[0,2],[5,9]],"x":[[0],[0],[0],[0]]}"#;
        let err = read_dataset(text.as_bytes(), "t", true).unwrap_err();
        assert!(err.to_string().contains("bad4"), "{err}");
    }

    #[test]
    fn empty_input_has_no_graphs() {
        let err = read_dataset("".as_bytes(), "t", true).unwrap_err();
        assert_eq!(err.to_string(), "no graphs");
    }
}
