//! Edge-list files and dataset directories.
//!
//! ```text
//! # comment
//! n 4
//! anchor 0
//! 0 1
//! 1 2
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use motif_forge_core::{Graph, NodeId};

use crate::error::{Error, Result};

pub fn parse_edge_list(text: &str, path: &Path) -> Result<Graph> {
    let err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
    let mut node_count: Option<usize> = None;
    let mut anchor: Option<NodeId> = None;
    let mut edges: Vec<(NodeId, NodeId, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let number = |s: &str| s.parse::<u64>().map_err(|_| err(i + 1, format!("expected a number, found `{s}`")));
        match fields.as_slice() {
            ["n", c] => {
                if node_count.is_some() {
                    return Err(err(i + 1, "duplicate `n` line".into()));
                }
                node_count = Some(number(c)? as usize);
            }
            ["anchor", a] => anchor = Some(number(a)? as NodeId),
            [u, v] => edges.push((number(u)? as NodeId, number(v)? as NodeId, i + 1)),
            _ => return Err(err(i + 1, format!("unrecognised line `{line}`"))),
        }
    }
    let n = node_count.ok_or_else(|| err(0, "missing `n <node_count>` header".into()))?;
    let mut g = Graph::empty(n);
    for (u, v, line) in edges {
        if u as usize >= n || v as usize >= n {
            return Err(err(line, format!("edge ({u}, {v}) outside 0..{n}")));
        }
        if u == v {
            return Err(err(line, format!("self-loop on {u}")));
        }
        g.add_edge(u, v);
    }
    if let Some(a) = anchor {
        g.set_anchor(Some(a)).map_err(|e| err(0, e.to_string()))?;
    }
    Ok(g)
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.node_count());
    if let Some(a) = g.anchor() {
        writeln!(out, "anchor {a}").unwrap();
    }
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path)
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<()> {
    write_file(path, format_edge_list(g))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Graph files of a dataset directory in lexicographic order.
pub fn dataset_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "edgelist"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn read_dataset(dir: &Path) -> Result<Vec<Graph>> {
    dataset_files(dir)?.iter().map(|p| read_graph(p)).collect()
}

/// Writes `graph_00000.edgelist`, ...; ids follow the input order.
pub fn write_dataset(dir: &Path, graphs: &[Graph]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, g) in graphs.iter().enumerate() {
        write_graph(&dir.join(format!("graph_{i:05}.edgelist")), g)?;
    }
    Ok(())
}

/// A single graph file, or a dataset directory taken as a disjoint union.
pub fn read_target(path: &Path) -> Result<Graph> {
    if path.is_dir() {
        let graphs = read_dataset(path)?;
        Ok(Graph::disjoint_union(&graphs).0)
    } else {
        Ok(read_graph(path)?.without_anchor())
    }
}
