//! Compressed-sparse-row adjacency and degree scoring.
//!
//! A [`CsrGraph`] is immutable once built. Neighbor lists are sorted
//! ascending and free of duplicates and self-loops, so `neighbors(v)` is a
//! canonical slice that samplers and tests can reason about directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsrGraph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl CsrGraph {
    /// Builds a graph from an edge list.
    ///
    /// Duplicate edges and self-loops are dropped. With `symmetrize` every
    /// edge is stored in both directions.
    pub fn from_edges(
        edges: &[(NodeId, NodeId)],
        num_nodes: usize,
        symmetrize: bool,
    ) -> Result<Self> {
        for &(u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::EdgeOutOfRange { u, v, num_nodes });
            }
        }

        let mut counts = vec![0usize; num_nodes + 1];
        let directed = edges.iter().filter(|(u, v)| u != v).flat_map(|&(u, v)| {
            let rev = symmetrize.then_some((v, u));
            std::iter::once((u, v)).chain(rev)
        });
        for (u, _) in directed.clone() {
            counts[u + 1] += 1;
        }
        for i in 0..num_nodes {
            counts[i + 1] += counts[i];
        }
        let mut cursor = counts.clone();
        let mut scratch = vec![0; counts[num_nodes]];
        for (u, v) in directed {
            scratch[cursor[u]] = v;
            cursor[u] += 1;
        }

        // Sort and dedup each row, compacting in place.
        let mut offsets = Vec::with_capacity(num_nodes + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(scratch.len());
        for u in 0..num_nodes {
            let row = &mut scratch[counts[u]..counts[u + 1]];
            row.sort_unstable();
            let start = targets.len();
            for &v in row.iter() {
                if targets.len() == start || targets[targets.len() - 1] != v {
                    targets.push(v);
                }
            }
            offsets.push(targets.len());
        }
        targets.shrink_to_fit();
        Ok(CsrGraph { offsets, targets })
    }

    /// Assembles a graph from raw CSR arrays, checking every invariant.
    pub fn from_raw(offsets: Vec<usize>, targets: Vec<NodeId>) -> Result<Self> {
        if offsets.first() != Some(&0) {
            return Err(Error::Contract("offsets must start at 0".into()));
        }
        let n = offsets.len() - 1;
        if offsets[n] != targets.len() {
            return Err(Error::Contract(format!(
                "offsets end at {} but there are {} targets",
                offsets[n],
                targets.len()
            )));
        }
        for v in 0..n {
            if offsets[v] > offsets[v + 1] {
                return Err(Error::Contract(format!("offsets decrease at node {v}")));
            }
            let row = &targets[offsets[v]..offsets[v + 1]];
            if row.iter().any(|&t| t >= n) {
                return Err(Error::Contract(format!("node {v} has a target out of range")));
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Contract(format!(
                    "neighbors of {v} are not strictly ascending"
                )));
            }
        }
        Ok(CsrGraph { offsets, targets })
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored directed edges.
    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[NodeId] {
        &self.targets
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Out-degree of `v`. Panics if `v` is not a node of the graph.
    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        assert!(v < self.num_nodes(), "node {v} out of range");
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Directed edge list in CSR order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.num_nodes()).flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v)))
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_nodes()).map(|v| self.degree(v)).max().unwrap_or(0)
    }
}

/// Per-node importance scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeScores(Vec<f64>);

impl NodeScores {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if let Some(v) = scores.iter().position(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::Contract(format!(
                "score of node {v} is not a finite non-negative number"
            )));
        }
        Ok(NodeScores(scores))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, v: NodeId) -> f64 {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Hook for ranking nodes by structural importance.
pub trait ScoringFn {
    fn score(&self, graph: &CsrGraph) -> NodeScores;
}

/// Scores every node by its degree.
#[derive(Debug, Clone, Copy, Default)]
pub struct DegreeScore;

impl ScoringFn for DegreeScore {
    fn score(&self, graph: &CsrGraph) -> NodeScores {
        NodeScores((0..graph.num_nodes()).map(|v| graph.degree(v) as f64).collect())
    }
}

/// Degree scores, `scores[v] = degree(v)`.
pub fn node_scores(graph: &CsrGraph) -> NodeScores {
    DegreeScore.score(graph)
}
