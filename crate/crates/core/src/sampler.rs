//! Seed batching and layered neighbor sampling.
//!
//! A mini-batch of seed nodes is expanded outward one GNN layer at a time.
//! For each layer the destination nodes draw a uniform sample of at most
//! `fanout` neighbors without replacement; the union of destinations and
//! sampled neighbors becomes the next layer's destination set. The result
//! is a list of bipartite [`Block`]s ordered input layer first.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, NodeId, NodeScores};

/// Fanout meaning "take every neighbor".
pub const FULL_FANOUT: usize = usize::MAX;

/// Per-layer fanouts. Entry `l - 1` bounds the neighbors sampled for GNN
/// layer `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoutSchedule(Vec<usize>);

impl FanoutSchedule {
    pub fn new(fanouts: Vec<usize>) -> Result<Self> {
        if fanouts.is_empty() || fanouts.contains(&0) {
            return Err(Error::Contract(format!(
                "fanouts must be non-empty and positive, got {fanouts:?}"
            )));
        }
        Ok(FanoutSchedule(fanouts))
    }

    /// Unbounded fanout at every layer.
    pub fn full(depth: usize) -> Self {
        FanoutSchedule(vec![FULL_FANOUT; depth])
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [usize] {
        &mut self.0
    }
}

/// Bipartite message-flow graph for one layer.
///
/// `dst_ids` occupy the leading positions of `src_ids` in the same order,
/// so destination `d` is also source `d`. Edges are grouped by destination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub src_ids: Vec<NodeId>,
    pub dst_ids: Vec<NodeId>,
    /// `(src_index, dst_index)` pairs.
    pub edges: Vec<(usize, usize)>,
    dst_offsets: Vec<usize>,
}

impl Block {
    pub fn num_src(&self) -> usize {
        self.src_ids.len()
    }

    pub fn num_dst(&self) -> usize {
        self.dst_ids.len()
    }

    /// Edges into destination `d`.
    pub fn in_edges(&self, d: usize) -> &[(usize, usize)] {
        &self.edges[self.dst_offsets[d]..self.dst_offsets[d + 1]]
    }

    pub fn in_degree(&self, d: usize) -> usize {
        self.dst_offsets[d + 1] - self.dst_offsets[d]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedOrderMode {
    ScoreWarmup,
    Shuffle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedOrderPolicy {
    pub mode: SeedOrderMode,
    pub warmup_epochs: usize,
}

impl SeedOrderPolicy {
    pub fn score_warmup(warmup_epochs: usize) -> Self {
        SeedOrderPolicy {
            mode: SeedOrderMode::ScoreWarmup,
            warmup_epochs,
        }
    }

    pub fn shuffle() -> Self {
        SeedOrderPolicy {
            mode: SeedOrderMode::Shuffle,
            warmup_epochs: 0,
        }
    }
}

/// Hasher for node ids: the splitmix64 finalizer. Ids are not adversarial,
/// so SipHash buys nothing here.
#[derive(Default)]
struct NodeIdHasher(u64);

impl Hasher for NodeIdHasher {
    fn finish(&self) -> u64 {
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = self.0.rotate_left(8) ^ u64::from(b);
        }
    }

    fn write_usize(&mut self, v: usize) {
        self.0 = v as u64;
    }
}

type LocalIndex = HashMap<NodeId, usize, BuildHasherDefault<NodeIdHasher>>;

/// Neighbor sampler. `self_loops` adds a `dst -> dst` edge for every
/// destination so a node's own representation enters its aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampler {
    pub self_loops: bool,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler { self_loops: true }
    }
}

impl Sampler {
    pub fn sample_block<R: Rng + ?Sized>(
        &self,
        graph: &CsrGraph,
        dst_ids: &[NodeId],
        fanout: usize,
        rng: &mut R,
    ) -> Result<Block> {
        if fanout == 0 {
            return Err(Error::Contract("fanout must be at least 1".into()));
        }
        if dst_ids.is_empty() {
            return Err(Error::Contract("destination set is empty".into()));
        }
        let expected = dst_ids.len() * (1 + fanout.min(graph.max_degree()).min(32));
        let mut local = LocalIndex::with_capacity_and_hasher(expected, Default::default());
        for (i, &v) in dst_ids.iter().enumerate() {
            if v >= graph.num_nodes() {
                return Err(Error::Contract(format!("destination {v} is not a node")));
            }
            if local.insert(v, i).is_some() {
                return Err(Error::Contract(format!("duplicate destination {v}")));
            }
        }
        let mut src_ids = Vec::with_capacity(expected);
        src_ids.extend_from_slice(dst_ids);
        let mut edges = Vec::with_capacity(expected);
        let mut dst_offsets = Vec::with_capacity(dst_ids.len() + 1);
        dst_offsets.push(0);
        let mut scratch: Vec<NodeId> = Vec::new();

        for (d, &v) in dst_ids.iter().enumerate() {
            if self.self_loops {
                edges.push((d, d));
            }
            let nbrs = graph.neighbors(v);
            let picked: &[NodeId] = if nbrs.len() <= fanout {
                nbrs
            } else {
                // Partial Fisher-Yates: the first `fanout` slots end up a
                // uniform sample without replacement.
                scratch.clear();
                scratch.extend_from_slice(nbrs);
                for i in 0..fanout {
                    let j = rng.random_range(i..scratch.len());
                    scratch.swap(i, j);
                }
                &scratch[..fanout]
            };
            for &u in picked {
                let s = *local.entry(u).or_insert_with(|| {
                    src_ids.push(u);
                    src_ids.len() - 1
                });
                edges.push((s, d));
            }
            dst_offsets.push(edges.len());
        }

        Ok(Block {
            src_ids,
            dst_ids: dst_ids.to_vec(),
            edges,
            dst_offsets,
        })
    }

    /// Expands `seeds` through `fanouts.len()` layers. `layer_rng(l)` supplies
    /// the random stream for layer `l` (1-based). The returned blocks run
    /// from layer 1 (consumes raw features) to layer L (emits the seeds).
    pub fn build_blocks<R: Rng>(
        &self,
        graph: &CsrGraph,
        seeds: &[NodeId],
        fanouts: &FanoutSchedule,
        mut layer_rng: impl FnMut(usize) -> R,
    ) -> Result<Vec<Block>> {
        let depth = fanouts.depth();
        let mut blocks = Vec::with_capacity(depth);
        let mut frontier = seeds.to_vec();
        for layer in (1..=depth).rev() {
            let mut rng = layer_rng(layer);
            let block = self.sample_block(graph, &frontier, fanouts.as_slice()[layer - 1], &mut rng)?;
            frontier = block.src_ids.clone();
            blocks.push(block);
        }
        blocks.reverse();
        Ok(blocks)
    }
}

/// [`Sampler::sample_block`] with self loops.
pub fn sample_block<R: Rng + ?Sized>(
    graph: &CsrGraph,
    dst_ids: &[NodeId],
    fanout: usize,
    rng: &mut R,
) -> Result<Block> {
    Sampler::default().sample_block(graph, dst_ids, fanout, rng)
}

/// [`Sampler::build_blocks`] with self loops.
pub fn build_blocks<R: Rng>(
    graph: &CsrGraph,
    seeds: &[NodeId],
    fanouts: &FanoutSchedule,
    layer_rng: impl FnMut(usize) -> R,
) -> Result<Vec<Block>> {
    Sampler::default().build_blocks(graph, seeds, fanouts, layer_rng)
}

/// Seed visiting order for `epoch` (1-based).
///
/// During warmup under [`SeedOrderMode::ScoreWarmup`] ids are sorted by
/// score descending, ties by ascending id. Otherwise a uniform shuffle.
pub fn order_seeds<R: Rng + ?Sized>(
    scores: &NodeScores,
    train_ids: &[NodeId],
    epoch: usize,
    policy: SeedOrderPolicy,
    rng: &mut R,
) -> Vec<NodeId> {
    let mut ids = train_ids.to_vec();
    if policy.mode == SeedOrderMode::ScoreWarmup && epoch <= policy.warmup_epochs {
        ids.sort_by(|&a, &b| scores.get(b).total_cmp(&scores.get(a)).then(a.cmp(&b)));
    } else {
        ids.shuffle(rng);
    }
    ids
}

/// Consecutive chunks of `batch_size`; the last may be short.
pub fn make_batches(ordered_ids: &[NodeId], batch_size: usize) -> Vec<Vec<NodeId>> {
    assert!(batch_size >= 1, "batch size must be positive");
    ordered_ids.chunks(batch_size).map(<[NodeId]>::to_vec).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{self, Purpose};

    fn star(k: usize) -> CsrGraph {
        let edges: Vec<_> = (1..=k).map(|leaf| (0, leaf)).collect();
        CsrGraph::from_edges(&edges, k + 1, true).unwrap()
    }

    #[test]
    fn low_degree_takes_all_neighbors() {
        let g = star(3);
        let b = sample_block(&g, &[0], 5, &mut rng::stream(1, Purpose::Sampling)).unwrap();
        assert_eq!(b.src_ids, vec![0, 1, 2, 3]);
        assert_eq!(b.edges, vec![(0, 0), (1, 0), (2, 0), (3, 0)]);
    }

    #[test]
    fn high_degree_samples_exactly_fanout() {
        let g = star(10);
        let b = sample_block(&g, &[0], 5, &mut rng::stream(2, Purpose::Sampling)).unwrap();
        let nbrs: Vec<_> = b.in_edges(0).iter().filter(|e| e.0 != 0).map(|e| b.src_ids[e.0]).collect();
        assert_eq!(nbrs.len(), 5);
        let mut uniq = nbrs.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 5);
        assert!(nbrs.iter().all(|&u| g.has_edge(0, u)));
        assert!(b.in_edges(0).contains(&(0, 0)));
    }

    #[test]
    fn duplicate_destination_rejected() {
        let g = star(3);
        let err = sample_block(&g, &[1, 1], 2, &mut rng::stream(0, Purpose::Sampling));
        assert!(matches!(err, Err(Error::Contract(_))));
        assert!(sample_block(&g, &[1], 0, &mut rng::stream(0, Purpose::Sampling)).is_err());
    }

    #[test]
    fn no_self_loop_knob() {
        let g = star(2);
        let s = Sampler { self_loops: false };
        let b = s.sample_block(&g, &[0], 5, &mut rng::stream(0, Purpose::Sampling)).unwrap();
        assert_eq!(b.edges, vec![(1, 0), (2, 0)]);
        assert_eq!(b.src_ids[0], 0);
    }

    #[test]
    fn single_layer_is_ego_net() {
        let g = star(4);
        let f = FanoutSchedule::new(vec![10]).unwrap();
        let blocks = build_blocks(&g, &[0], &f, |l| rng::substream(0, Purpose::Sampling, 0, 0, l as u64)).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].src_ids, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn two_hop_path_reaches_end() {
        let g = CsrGraph::from_edges(&[(0, 1), (1, 2)], 3, true).unwrap();
        let f = FanoutSchedule::new(vec![2, 2]).unwrap();
        let blocks = build_blocks(&g, &[0], &f, |l| rng::substream(0, Purpose::Sampling, 0, 0, l as u64)).unwrap();
        let mut field = blocks[0].src_ids.clone();
        field.sort();
        assert_eq!(field, vec![0, 1, 2]);
        assert_eq!(blocks[0].dst_ids, blocks[1].src_ids);
        assert_eq!(blocks[1].dst_ids, vec![0]);
    }

    #[test]
    fn warmup_sorts_by_score() {
        let scores = NodeScores::new(vec![1.0, 5.0, 3.0]).unwrap();
        let mut r = rng::stream(0, Purpose::SeedOrder);
        let p = SeedOrderPolicy::score_warmup(2);
        assert_eq!(order_seeds(&scores, &[0, 1, 2], 1, p, &mut r), vec![1, 2, 0]);
        let flat = NodeScores::new(vec![2.0; 4]).unwrap();
        assert_eq!(order_seeds(&flat, &[3, 1, 0, 2], 2, p, &mut r), vec![0, 1, 2, 3]);
    }

    #[test]
    fn batches_partition_input() {
        let ids: Vec<_> = (0..10).collect();
        let b = make_batches(&ids, 4);
        assert_eq!(b.iter().map(Vec::len).collect::<Vec<_>>(), vec![4, 4, 2]);
        assert_eq!(b.concat(), ids);
        assert_eq!(make_batches(&ids, 10).len(), 1);
        assert_eq!(make_batches(&ids, 64).len(), 1);
    }
}
