//! Synthetic graph and feature generators.
//!
//! All generators are deterministic for a fixed seed.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::dataset::Split;
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, NodeId};
use crate::rng::{self, Purpose};

/// Block of node `v` when `num_nodes` nodes are cut into `num_blocks`
/// contiguous, near-equal ranges.
pub fn contiguous_block(v: NodeId, num_nodes: usize, num_blocks: usize) -> usize {
    v * num_blocks / num_nodes
}

/// Stochastic block model. Every unordered pair `{u, v}` becomes an edge
/// independently with probability `p_intra` when both ends share a block
/// and `p_inter` otherwise.
pub fn gen_sbm(
    num_nodes: usize,
    num_blocks: usize,
    p_intra: f64,
    p_inter: f64,
    seed: u64,
) -> Result<(CsrGraph, Vec<usize>)> {
    if !(0.0..=1.0).contains(&p_intra) || !(0.0..=1.0).contains(&p_inter) || p_inter > p_intra {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= p_inter <= p_intra <= 1, got p_intra={p_intra} p_inter={p_inter}"
        )));
    }
    if num_blocks == 0 || num_blocks > num_nodes.max(1) {
        return Err(Error::InvalidParameter(format!(
            "num_blocks must be in [1, num_nodes], got {num_blocks}"
        )));
    }
    let blocks: Vec<usize> = (0..num_nodes)
        .map(|v| contiguous_block(v, num_nodes, num_blocks))
        .collect();
    let mut rng = rng::stream(seed, Purpose::Generator);
    let mut edges = Vec::new();
    for u in 0..num_nodes {
        for v in (u + 1)..num_nodes {
            let p = if blocks[u] == blocks[v] { p_intra } else { p_inter };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok((CsrGraph::from_edges(&edges, num_nodes, true)?, blocks))
}

/// Barabási–Albert preferential attachment: a clique on `m + 1` nodes, then
/// each arrival links to `m` distinct existing nodes chosen with probability
/// proportional to degree.
pub fn gen_preferential_attachment(num_nodes: usize, m: usize, seed: u64) -> Result<CsrGraph> {
    gen_homophilous_attachment(num_nodes, m, 1, 0.0, seed).map(|(g, _)| g)
}

/// Preferential attachment with planted classes. Node `v` belongs to class
/// `v % num_blocks`; each of its `m` links is drawn from its own class's
/// degree-weighted pool with probability `homophily`, otherwise from the
/// whole graph's pool. With one block this is plain preferential attachment.
pub fn gen_homophilous_attachment(
    num_nodes: usize,
    m: usize,
    num_blocks: usize,
    homophily: f64,
    seed: u64,
) -> Result<(CsrGraph, Vec<usize>)> {
    if m == 0 || num_nodes <= m {
        return Err(Error::InvalidParameter(format!(
            "need m >= 1 and num_nodes > m, got m={m} num_nodes={num_nodes}"
        )));
    }
    if num_blocks == 0 {
        return Err(Error::InvalidParameter("num_blocks must be positive".into()));
    }
    if !(0.0..=1.0).contains(&homophily) {
        return Err(Error::InvalidParameter(format!(
            "homophily must be in [0, 1], got {homophily}"
        )));
    }
    let blocks: Vec<usize> = (0..num_nodes).map(|v| v % num_blocks).collect();
    let mut rng = rng::stream(seed, Purpose::Generator);

    // Each endpoint appears once per incident edge, so a uniform draw from a
    // pool is a degree-proportional draw.
    let mut pool: Vec<NodeId> = Vec::new();
    let mut block_pool: Vec<Vec<NodeId>> = vec![Vec::new(); num_blocks];
    let mut edges = Vec::with_capacity(m * num_nodes);
    let mut add_edge = |u: NodeId, v: NodeId, pool: &mut Vec<NodeId>, bp: &mut Vec<Vec<NodeId>>| {
        edges.push((u, v));
        pool.extend([u, v]);
        bp[blocks[u]].push(u);
        bp[blocks[v]].push(v);
    };

    for u in 0..=m {
        for v in (u + 1)..=m {
            add_edge(u, v, &mut pool, &mut block_pool);
        }
    }

    let mut chosen = Vec::with_capacity(m);
    for v in (m + 1)..num_nodes {
        chosen.clear();
        let own = &block_pool[blocks[v]];
        let mut rejections = 0;
        while chosen.len() < m {
            let from_block = !own.is_empty() && rejections < 32 && rng.random::<f64>() < homophily;
            let candidates = if from_block { own } else { &pool };
            let t = candidates[rng.random_range(0..candidates.len())];
            if chosen.contains(&t) {
                rejections += 1;
            } else {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            add_edge(v, t, &mut pool, &mut block_pool);
        }
    }
    Ok((CsrGraph::from_edges(&edges, num_nodes, true)?, blocks))
}

/// Features and labels planted on a block assignment.
///
/// Class `c` has centroid `e_c` (the `c`-th unit vector); each row is its
/// class centroid plus i.i.d. `N(0, noise_sigma^2)` noise. Labels equal the
/// block ids.
pub fn gen_planted_features(
    graph: &CsrGraph,
    blocks: &[usize],
    feat_dim: usize,
    noise_sigma: f64,
    seed: u64,
) -> Result<(Array2<f64>, Vec<usize>)> {
    if blocks.len() != graph.num_nodes() {
        return Err(Error::InvalidParameter(format!(
            "block assignment has {} entries for {} nodes",
            blocks.len(),
            graph.num_nodes()
        )));
    }
    let num_blocks = blocks.iter().max().map_or(0, |b| b + 1);
    if feat_dim < num_blocks {
        return Err(Error::InvalidParameter(format!(
            "feat_dim {feat_dim} is smaller than the number of blocks {num_blocks}"
        )));
    }
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("bad noise sigma {noise_sigma}")));
    }
    let normal = Normal::new(0.0, noise_sigma)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = rng::stream(seed, Purpose::Features);
    let mut features = Array2::zeros((blocks.len(), feat_dim));
    for (v, mut row) in features.rows_mut().into_iter().enumerate() {
        for x in row.iter_mut() {
            *x = normal.sample(&mut rng);
        }
        row[blocks[v]] += 1.0;
    }
    Ok((features, blocks.to_vec()))
}

/// Random train/val/test assignment with exact proportions
/// (`round(frac * n)` nodes for train and val, the rest test).
pub fn random_split(num_nodes: usize, train_frac: f64, val_frac: f64, seed: u64) -> Result<Vec<Split>> {
    if !(train_frac > 0.0 && val_frac >= 0.0 && train_frac + val_frac <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "bad split fractions train={train_frac} val={val_frac}"
        )));
    }
    let mut order: Vec<NodeId> = (0..num_nodes).collect();
    order.shuffle(&mut rng::stream(seed, Purpose::Split));
    let n_train = (train_frac * num_nodes as f64).round() as usize;
    let n_val = ((val_frac * num_nodes as f64).round() as usize).min(num_nodes - n_train);
    let mut split = vec![Split::Test; num_nodes];
    for &v in &order[..n_train] {
        split[v] = Split::Train;
    }
    for &v in &order[n_train..n_train + n_val] {
        split[v] = Split::Val;
    }
    Ok(split)
}
