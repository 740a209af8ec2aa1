//! SNAP-style edge lists: one whitespace-separated `src dst` pair per line,
//! `#` starts a comment line.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Graph, NodeId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Each line `u v` is the influence edge `u -> v`.
    Directed,
    /// Each line `u v` becomes both `u -> v` and `v -> u`.
    Undirected,
}

pub fn load_edge_list(path: impl AsRef<Path>, treat_as: Orientation) -> Result<Graph> {
    let file = File::open(path)?;
    parse_edge_list(file, treat_as)
}

/// Parses an edge list. Labels are compacted to dense ids in order of first
/// appearance; self-loops are dropped and duplicate pairs collapsed. Every
/// edge gets weight 1.0 until a weighting scheme is applied.
pub fn parse_edge_list<R: Read>(reader: R, treat_as: Orientation) -> Result<Graph> {
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();

    let mut intern = |label: &str, labels: &mut Vec<String>| -> NodeId {
        *ids.entry(label.to_owned()).or_insert_with(|| {
            labels.push(label.to_owned());
            labels.len() - 1
        })
    };

    for (index, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (src, dst) = match (fields.next(), fields.next(), fields.next()) {
            (Some(src), Some(dst), None) => (src, dst),
            _ => {
                return Err(Error::Parse {
                    line: index + 1,
                    message: format!("expected `src dst`, found `{trimmed}`"),
                })
            }
        };
        let u = intern(src, &mut labels);
        let v = intern(dst, &mut labels);
        if u == v {
            continue;
        }
        edges.push((u, v, 1.0));
        if treat_as == Orientation::Undirected {
            edges.push((v, u, 1.0));
        }
    }

    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Graph::from_edges_labeled(labels, &edges)
}

/// Writes the graph as a directed edge list using the original labels.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    for (u, v, _) in graph.edges() {
        writeln!(out, "{}\t{}", graph.label(u), graph.label(v))?;
    }
    Ok(())
}

/// CSV side map from original labels to dense ids.
pub fn write_label_map<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "label,id")?;
    for (id, label) in graph.labels().iter().enumerate() {
        if label.contains([',', '"']) {
            writeln!(out, "\"{}\",{id}", label.replace('"', "\"\""))?;
        } else {
            writeln!(out, "{label},{id}")?;
        }
    }
    Ok(())
}
