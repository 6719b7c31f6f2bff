use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use log::warn;

use super::WeightedGraph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SelfLoopPolicy {
    /// Drop the line and log a warning.
    #[default]
    Drop,
    /// Fail with a parse error.
    Error,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LoadOptions {
    pub on_self_loop: SelfLoopPolicy,
}

/// Reads a tab-separated edge list: `src<TAB>dst[<TAB>weight]` per line.
///
/// Lines starting with `#` and blank lines are skipped. The weight defaults
/// to 1. Vertices are indexed in order of first appearance and repeated
/// pairs (either orientation) have their weights summed.
pub fn load_edge_list<R: Read>(source: R, options: LoadOptions) -> Result<WeightedGraph> {
    let reader = BufReader::new(source);
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut data_lines = 0usize;

    let mut intern = |label: &str| -> usize {
        if let Some(&i) = index.get(label) {
            return i;
        }
        let i = labels.len();
        labels.push(label.to_owned());
        index.insert(label.to_owned(), i);
        i
    };

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::Parse {
                line: lineno,
                message: "invalid UTF-8".into(),
            },
            _ => Error::Io(e),
        })?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        data_lines += 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 2 or 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let (src, dst) = (fields[0].trim(), fields[1].trim());
        if src.is_empty() || dst.is_empty() {
            return Err(Error::Parse {
                line: lineno,
                message: "empty vertex label".into(),
            });
        }
        let weight = match fields.get(2) {
            None => 1.0,
            Some(raw) => {
                let w: f64 = raw.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid weight {raw:?}"),
                })?;
                if !w.is_finite() {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("non-finite weight {raw:?}"),
                    });
                }
                if w < 0.0 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("negative weight {w}"),
                    });
                }
                w
            }
        };
        let i = intern(src);
        let j = intern(dst);
        if i == j {
            match options.on_self_loop {
                SelfLoopPolicy::Drop => {
                    warn!("line {lineno}: dropping self-loop on {src:?}");
                    continue;
                }
                SelfLoopPolicy::Error => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("self-loop on {src:?}"),
                    })
                }
            }
        }
        edges.push((i, j, weight));
    }

    if data_lines == 0 {
        return Err(Error::EmptyInput);
    }
    WeightedGraph::from_edges(labels, edges)
}

pub fn load_edge_list_path(path: impl AsRef<Path>, options: LoadOptions) -> Result<WeightedGraph> {
    load_edge_list(File::open(path)?, options)
}
