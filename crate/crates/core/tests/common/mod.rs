//! Independent oracles shared by the property tests and the acceptance run.
#![allow(dead_code)]

use dafos::graph::CsrGraph;
use dafos::model::{cross_entropy, forward, Aggregator, GcnParams};
use dafos::rng::{self, Purpose};
use dafos::sampler::{build_blocks, Block, FanoutSchedule};
use ndarray::Array2;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

pub struct Instance {
    pub graph: CsrGraph,
    pub features: Array2<f64>,
    pub blocks: Vec<Block>,
    pub labels: Vec<usize>,
    pub params: GcnParams,
}

/// Small random two-layer problem: at most 30 nodes, hidden width at most 8.
pub fn random_instance(seed: u64) -> Instance {
    let mut r = rng::stream(seed, Purpose::Generator);
    let n = r.random_range(6..=30);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random_bool(0.2) {
                edges.push((u, v));
            }
        }
    }
    let graph = CsrGraph::from_edges(&edges, n, true).unwrap();
    let in_dim = r.random_range(2..=6);
    let hidden = r.random_range(2..=8);
    let classes = r.random_range(2..=4);
    let features = Array2::from_shape_fn((n, in_dim), |_| r.sample::<f64, _>(StandardNormal));
    let k = r.random_range(1..=n.min(8));
    let seeds = sample(&mut r, n, k).into_vec();
    let fanouts = FanoutSchedule::new(vec![r.random_range(1..=4), r.random_range(1..=4)]).unwrap();
    let blocks = build_blocks(&graph, &seeds, &fanouts, |l| {
        rng::substream(seed, Purpose::Sampling, 0, 0, l as u64)
    })
    .unwrap();
    let labels = seeds.iter().map(|_| r.random_range(0..classes)).collect();
    let params = GcnParams::init(&[in_dim, hidden, classes], seed);
    Instance {
        graph,
        features,
        blocks,
        labels,
        params,
    }
}

/// Row-normalised dense operator of a block: `A[d, s]` is the weight source
/// `s` contributes to destination `d`.
pub fn dense_operator(block: &Block, aggregator: Aggregator) -> Array2<f64> {
    let mut a = Array2::zeros((block.num_dst(), block.num_src()));
    for &(s, d) in &block.edges {
        a[[d, s]] += 1.0;
    }
    if aggregator == Aggregator::Mean {
        for mut row in a.rows_mut() {
            let k = row.sum();
            if k > 0.0 {
                row /= k;
            }
        }
    }
    a
}

/// Dense matrix forward pass: `H <- relu(A H W)` with no activation last.
pub fn dense_forward(inst: &Instance, aggregator: Aggregator) -> Array2<f64> {
    let mut h = Array2::from_shape_fn((inst.blocks[0].num_src(), inst.features.ncols()), |(i, j)| {
        inst.features[[inst.blocks[0].src_ids[i], j]]
    });
    let depth = inst.blocks.len();
    for (l, (block, w)) in inst.blocks.iter().zip(&inst.params.weights).enumerate() {
        h = dense_operator(block, aggregator).dot(&h).dot(w);
        if l + 1 < depth {
            h.mapv_inplace(|x| x.max(0.0));
        }
    }
    h
}

pub fn loss_at(inst: &Instance, params: &GcnParams, aggregator: Aggregator) -> f64 {
    let (logits, _) = forward(&inst.blocks, &inst.features, params, aggregator).unwrap();
    cross_entropy(&logits, &inst.labels).unwrap().0
}

/// Sign pattern of every hidden pre-activation.
fn relu_pattern(inst: &Instance, params: &GcnParams, aggregator: Aggregator) -> Vec<bool> {
    let (_, cache) = forward(&inst.blocks, &inst.features, params, aggregator).unwrap();
    let hidden = &cache.layers[..cache.layers.len() - 1];
    hidden.iter().zip(&params.weights).flat_map(|(c, w)| c.aggregated.dot(w).iter().map(|&z| z > 0.0).collect::<Vec<_>>()).collect()
}

pub struct GradCheck {
    pub max_rel_err: f64,
    pub checked: usize,
    /// Entries whose perturbation crossed a ReLU kink.
    pub skipped: usize,
}

/// Central finite differences against the analytic gradient.
/// Relative error is `|a - n| / max(|a|, |n|, 1e-6)`.
pub fn gradient_check(inst: &Instance, aggregator: Aggregator, h: f64) -> GradCheck {
    let (_, cache) = forward(&inst.blocks, &inst.features, &inst.params, aggregator).unwrap();
    let analytic = dafos::model::backward(&inst.params, &cache, &inst.labels).unwrap();
    let base_pattern = relu_pattern(inst, &inst.params, aggregator);
    let mut out = GradCheck {
        max_rel_err: 0.0,
        checked: 0,
        skipped: 0,
    };
    for (l, w) in inst.params.weights.iter().enumerate() {
        for idx in ndarray::indices(w.raw_dim()) {
            let mut plus = inst.params.clone();
            plus.weights[l][idx] += h;
            let mut minus = inst.params.clone();
            minus.weights[l][idx] -= h;
            if relu_pattern(inst, &plus, aggregator) != base_pattern
                || relu_pattern(inst, &minus, aggregator) != base_pattern
            {
                out.skipped += 1;
                continue;
            }
            let numeric = (loss_at(inst, &plus, aggregator) - loss_at(inst, &minus, aggregator)) / (2.0 * h);
            let a = analytic[l][idx];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
            out.max_rel_err = out.max_rel_err.max(rel);
            out.checked += 1;
        }
    }
    out
}

/// One-line reference for the fanout update: returns the fanouts after each
/// epoch loss.
pub fn fanout_oracle(initial: &[usize], delta_f: usize, epsilon: f64, losses: &[f64]) -> Vec<Vec<usize>> {
    let mut f = initial.to_vec();
    let mut prev: Option<f64> = None;
    let mut out = Vec::new();
    for &loss in losses {
        if matches!(prev, Some(p) if (loss - p).abs() < epsilon) {
            f.iter_mut().for_each(|x| *x += delta_f);
        }
        prev = Some(loss);
        out.push(f.clone());
    }
    out
}

/// Index of the observation at which the stopper should first fire, found
/// by recomputing every window comparison from scratch.
pub fn stop_oracle(stream: &[f64], delta: f64, n: usize) -> Option<usize> {
    let mut run = 0;
    for t in 0..stream.len() {
        if t >= n {
            if stream[t] - stream[t - n] < delta {
                run += 1;
            } else {
                run = 0;
            }
        }
        if run >= n {
            return Some(t);
        }
    }
    None
}
