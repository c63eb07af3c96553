//! Edge-list, feature and label file formats.
//!
//! Edge lists are UTF-8 text: `#` starts a comment, an optional `#n <N>`
//! header fixes the node count, and data lines are `i j` or `i j w` with
//! 0-based ids.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;

use super::Graph;
use crate::{Error, Result};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&read(path.as_ref())?)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut header_n: Option<usize> = None;
    let mut max_id: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut parts = rest.split_whitespace();
            if parts.next() == Some("n") {
                let value = parts.next().and_then(|t| t.parse::<usize>().ok());
                match (value, parts.next()) {
                    (Some(n), None) => header_n = Some(n),
                    _ => {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("malformed node-count header {line:?}"),
                        })
                    }
                }
            }
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&tokens.len()) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected `i j [w]`, got {line:?}"),
            });
        }
        let id = |t: &str| {
            t.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad node id {t:?}"),
            })
        };
        let i = id(tokens[0])?;
        let j = id(tokens[1])?;
        let w = match tokens.get(2) {
            Some(t) => t.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad weight {t:?}"),
            })?,
            None => 1.0,
        };
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        if w < 0.0 {
            return Err(Error::NegativeWeight { i, j, weight: w });
        }
        max_id = Some(max_id.map_or(i.max(j), |m| m.max(i).max(j)));
        edges.push((i, j, w));
    }
    let n = match (header_n, max_id) {
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => 0,
    };
    Graph::from_edges(n, edges)
}

/// Renders a graph in edge-list form, always with the `#n` header.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("#n {}\n", g.n());
    for e in g.edges() {
        if e.w == 1.0 {
            let _ = writeln!(out, "{} {}", e.i, e.j);
        } else {
            let _ = writeln!(out, "{} {} {}", e.i, e.j, e.w);
        }
    }
    out
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_edge_list(g)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Feature CSV: row `r` holds the features of node `r`, no header.
pub fn load_features(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    let text = read(path.as_ref())?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad feature value {t:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {} columns, got {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    let d = rows.first().map_or(0, Vec::len);
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((rows.len(), d), flat)
        .map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Label CSV with a `node,label` header. Every node in `0..n` must be labelled.
pub fn load_labels(path: impl AsRef<Path>, n: usize) -> Result<Vec<usize>> {
    let text = read(path.as_ref())?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "node,label" => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header `node,label`".into(),
            })
        }
    }
    let mut labels = vec![None; n];
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::Parse {
            line: idx + 1,
            msg: format!("expected `node,label`, got {line:?}"),
        };
        let (node, label) = line.split_once(',').ok_or_else(bad)?;
        let node: usize = node.trim().parse().map_err(|_| bad())?;
        let label: usize = label.trim().parse().map_err(|_| bad())?;
        if node >= n {
            return Err(Error::NodeOutOfRange { index: node, n });
        }
        labels[node] = Some(label);
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::InvalidParameter(format!("node {i} has no label"))))
        .collect()
}
