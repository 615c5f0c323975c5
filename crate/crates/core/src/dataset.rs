//! Dataset directories.
//!
//! A dataset lives in a directory of four newline-terminated text files:
//!
//! | file           | content                                                      |
//! |----------------|--------------------------------------------------------------|
//! | `graph.edges`  | optional `# nodes=<n> symmetrize=<0\|1>` header, then `u<TAB>v` lines |
//! | `features.csv` | one comma-separated row of decimals per node                 |
//! | `labels.csv`   | one class id per line                                        |
//! | `splits.csv`   | `train`, `val` or `test` per line                            |
//!
//! Row `i` of every per-node file describes node `i`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, NodeId};

pub const EDGES_FILE: &str = "graph.edges";
pub const FEATURES_FILE: &str = "features.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const SPLITS_FILE: &str = "splits.csv";
pub const NODE_IDS_FILE: &str = "node_ids.txt";

/// Directed `(src, dst)` pairs.
pub type EdgeList = Vec<(NodeId, NodeId)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split tag {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub graph: CsrGraph,
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub split: Vec<Split>,
}

impl DatasetBundle {
    pub fn new(
        graph: CsrGraph,
        features: Array2<f64>,
        labels: Vec<usize>,
        split: Vec<Split>,
    ) -> Result<Self> {
        let n = graph.num_nodes();
        if features.nrows() != n || labels.len() != n || split.len() != n {
            return Err(Error::Contract(format!(
                "dataset has {n} nodes but {} feature rows, {} labels, {} split tags",
                features.nrows(),
                labels.len(),
                split.len()
            )));
        }
        Ok(DatasetBundle {
            graph,
            features,
            labels,
            split,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn feat_dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |c| c + 1)
    }

    /// Node ids carrying `tag`, ascending.
    pub fn ids(&self, tag: Split) -> Vec<NodeId> {
        (0..self.num_nodes()).filter(|&v| self.split[v] == tag).collect()
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Parses one value per non-empty line, returning the values in file order.
fn read_lines<T>(path: &Path, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>> {
    read(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse(l.trim()).map_err(|m| parse_err(path, i + 1, m)))
        .collect()
}

struct EdgeHeader {
    nodes: Option<usize>,
    symmetrize: bool,
}

fn parse_header(path: &Path, line: usize, text: &str) -> Result<EdgeHeader> {
    let mut header = EdgeHeader {
        nodes: None,
        symmetrize: true,
    };
    for field in text.trim_start_matches('#').split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(path, line, format!("bad header field {field:?}")))?;
        match key {
            "nodes" => {
                header.nodes = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(path, line, format!("bad node count {value:?}")))?,
                )
            }
            "symmetrize" => {
                header.symmetrize = match value {
                    "0" => false,
                    "1" => true,
                    _ => return Err(parse_err(path, line, format!("bad symmetrize flag {value:?}"))),
                }
            }
            _ => return Err(parse_err(path, line, format!("unknown header key {key:?}"))),
        }
    }
    Ok(header)
}

fn read_edges(path: &Path) -> Result<(Option<EdgeHeader>, EdgeList)> {
    let text = read(path)?;
    let mut header = None;
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if i == 0 {
                header = Some(parse_header(path, 1, line)?);
            }
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(u), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(path, i + 1, "expected `u<TAB>v`"));
        };
        let id = |s: &str| {
            s.trim()
                .parse::<NodeId>()
                .map_err(|_| parse_err(path, i + 1, format!("bad node id {s:?}")))
        };
        edges.push((id(u)?, id(v)?));
    }
    Ok((header, edges))
}

/// Loads a dataset directory. Edges are symmetrized unless the header says
/// `symmetrize=0`.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<DatasetBundle> {
    load_dataset_with(dir, None)
}

/// Like [`load_dataset`], with `symmetrize` overriding the file header.
pub fn load_dataset_with(dir: impl AsRef<Path>, symmetrize: Option<bool>) -> Result<DatasetBundle> {
    let dir = dir.as_ref();
    let labels_path = dir.join(LABELS_FILE);
    let labels: Vec<usize> = read_lines(&labels_path, |s| {
        s.parse().map_err(|_| format!("bad label {s:?}"))
    })?;

    let edges_path = dir.join(EDGES_FILE);
    let (header, edges) = read_edges(&edges_path)?;
    let num_nodes = header.as_ref().and_then(|h| h.nodes).unwrap_or(labels.len());
    let sym = symmetrize.unwrap_or(header.as_ref().is_none_or(|h| h.symmetrize));
    if let Some(pos) = edges.iter().position(|&(u, v)| u >= num_nodes || v >= num_nodes) {
        let (u, v) = edges[pos];
        return Err(Error::EdgeOutOfRange { u, v, num_nodes });
    }
    let graph = CsrGraph::from_edges(&edges, num_nodes, sym)?;

    if labels.len() != num_nodes {
        return Err(Error::RowCount {
            path: labels_path,
            expected: num_nodes,
            found: labels.len(),
        });
    }

    let features_path = dir.join(FEATURES_FILE);
    let rows: Vec<Vec<f64>> = read_lines(&features_path, |s| {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?}")))
            .collect()
    })?;
    if rows.len() != num_nodes {
        return Err(Error::RowCount {
            path: features_path,
            expected: num_nodes,
            found: rows.len(),
        });
    }
    let feat_dim = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != feat_dim) {
        return Err(parse_err(
            &features_path,
            bad + 1,
            format!("expected {feat_dim} columns, found {}", rows[bad].len()),
        ));
    }
    let features = Array2::from_shape_vec((num_nodes, feat_dim), rows.concat())
        .expect("row lengths checked");

    let splits_path = dir.join(SPLITS_FILE);
    let split: Vec<Split> = read_lines(&splits_path, Split::from_str)?;
    if split.len() != num_nodes {
        return Err(Error::RowCount {
            path: splits_path,
            expected: num_nodes,
            found: split.len(),
        });
    }

    DatasetBundle::new(graph, features, labels, split)
}

fn write(path: PathBuf, text: String) -> Result<()> {
    fs::write(&path, text).map_err(|e| Error::io(path, e))
}

fn is_symmetric(graph: &CsrGraph) -> bool {
    graph.edges().all(|(u, v)| graph.has_edge(v, u))
}

/// Writes `bundle` into `dir`, creating it if needed. Symmetric graphs are
/// written once per undirected edge with `symmetrize=1`.
pub fn save_dataset(bundle: &DatasetBundle, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let sym = is_symmetric(&bundle.graph);
    let mut edges = format!("# nodes={} symmetrize={}\n", bundle.num_nodes(), sym as u8);
    for (u, v) in bundle.graph.edges().filter(|&(u, v)| !sym || u < v) {
        writeln!(edges, "{u}\t{v}").unwrap();
    }
    write(dir.join(EDGES_FILE), edges)?;

    let mut features = String::new();
    for row in bundle.features.rows() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        features.push_str(&cells.join(","));
        features.push('\n');
    }
    write(dir.join(FEATURES_FILE), features)?;

    let labels: String = bundle.labels.iter().map(|l| format!("{l}\n")).collect();
    write(dir.join(LABELS_FILE), labels)?;

    let splits: String = bundle.split.iter().map(|s| format!("{}\n", s.as_str())).collect();
    write(dir.join(SPLITS_FILE), splits)
}

/// Reads a whitespace- or tab-separated edge list whose node names are
/// arbitrary tokens. Names are mapped to dense ids in order of first
/// appearance; the returned vector maps dense id back to name.
pub fn read_edge_list_remapped(path: impl AsRef<Path>) -> Result<(EdgeList, Vec<String>)> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut names = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |name: &str| -> NodeId {
        *index.entry(name.to_string()).or_insert_with(|| {
            names.push(name.to_string());
            names.len() - 1
        })
    };
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(u), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(path, i + 1, "expected two node names"));
        };
        let (u, v) = (intern(u), intern(v));
        edges.push((u, v));
    }
    Ok((edges, names))
}

/// Persists the dense-id → original-name mapping, one name per line.
pub fn save_node_ids(names: &[String], dir: impl AsRef<Path>) -> Result<()> {
    let text: String = names.iter().map(|n| format!("{n}\n")).collect();
    write(dir.as_ref().join(NODE_IDS_FILE), text)
}
