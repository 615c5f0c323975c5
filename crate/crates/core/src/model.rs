//! GCN over sampled blocks with hand-derived gradients.
//!
//! Layer `l` aggregates its block's incoming edges,
//! `A_i = agg_{j -> i} H_j`, then applies `H_i = ReLU(A_i W_l)`. The last
//! layer skips the ReLU and emits logits; softmax is fused into the loss.
//! Everything is `f64`.

use ndarray::Array2;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::sampler::Block;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    /// Average over incoming edges.
    #[default]
    Mean,
    /// Plain sum over incoming edges.
    Sum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcnParams {
    pub weights: Vec<Array2<f64>>,
}

impl GcnParams {
    /// Glorot-uniform weights for layer widths `dims = [in, hidden.., out]`.
    pub fn init(dims: &[usize], seed: u64) -> Self {
        assert!(dims.len() >= 2, "need at least an input and an output width");
        let weights = dims
            .windows(2)
            .enumerate()
            .map(|(l, w)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let mut r = rng::substream(seed, Purpose::Init, 0, 0, l as u64);
                Array2::from_shape_fn((fan_in, fan_out), |_| r.random_range(-bound..=bound))
            })
            .collect();
        GcnParams { weights }
    }

    pub fn depth(&self) -> usize {
        self.weights.len()
    }

    pub fn zeros_like(&self) -> Vec<Array2<f64>> {
        self.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect()
    }

    fn check(&self) -> Result<()> {
        for (l, pair) in self.weights.windows(2).enumerate() {
            if pair[0].ncols() != pair[1].nrows() {
                return Err(Error::Shape {
                    layer: l + 2,
                    message: format!(
                        "weight is {:?} but the previous layer emits {} columns",
                        pair[1].dim(),
                        pair[0].ncols()
                    ),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LayerCache {
    /// Aggregated inputs, one row per destination.
    pub aggregated: Array2<f64>,
    /// `ReLU(aggregated . W)` on hidden layers, the logits on the last.
    pub output: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct ForwardCache<'a> {
    pub layers: Vec<LayerCache>,
    pub blocks: &'a [Block],
    pub aggregator: Aggregator,
}

impl ForwardCache<'_> {
    pub fn logits(&self) -> &Array2<f64> {
        &self.layers.last().expect("at least one layer").output
    }
}

fn edge_scale(block: &Block, d: usize, aggregator: Aggregator) -> f64 {
    match aggregator {
        Aggregator::Sum => 1.0,
        Aggregator::Mean => {
            let k = block.in_degree(d);
            if k == 0 {
                0.0
            } else {
                1.0 / k as f64
            }
        }
    }
}

/// Sums (or averages) source rows into destination rows. Source `s` reads
/// row `row_of(s)` of `h`.
fn aggregate(
    block: &Block,
    h: &Array2<f64>,
    row_of: impl Fn(usize) -> usize,
    aggregator: Aggregator,
) -> Array2<f64> {
    let width = h.ncols();
    let h = h.as_standard_layout();
    let all = h.as_slice().expect("standard layout");
    let src = |s: usize| {
        let r = row_of(s);
        &all[r * width..(r + 1) * width]
    };
    let mut out = Vec::with_capacity(block.num_dst() * width);
    for d in 0..block.num_dst() {
        let start = out.len();
        match block.in_edges(d).split_first() {
            None => out.resize(start + width, 0.0),
            Some((&(first, _), rest)) => {
                out.extend_from_slice(src(first));
                let row = &mut out[start..];
                for &(s, _) in rest {
                    for (o, x) in row.iter_mut().zip(src(s)) {
                        *o += x;
                    }
                }
                let c = edge_scale(block, d, aggregator);
                if c != 1.0 {
                    row.iter_mut().for_each(|o| *o *= c);
                }
            }
        }
    }
    Array2::from_shape_vec((block.num_dst(), width), out).expect("row count times width")
}

/// Forward pass. `features` is the full node-feature matrix; rows for the
/// first block's sources are gathered from it.
pub fn forward<'a>(
    blocks: &'a [Block],
    features: &Array2<f64>,
    params: &GcnParams,
    aggregator: Aggregator,
) -> Result<(Array2<f64>, ForwardCache<'a>)> {
    params.check()?;
    if blocks.len() != params.depth() {
        return Err(Error::Shape {
            layer: 0,
            message: format!("{} blocks for a {}-layer model", blocks.len(), params.depth()),
        });
    }
    if blocks.is_empty() {
        return Err(Error::Shape {
            layer: 0,
            message: "model has no layers".into(),
        });
    }
    if features.ncols() != params.weights[0].nrows() {
        return Err(Error::Shape {
            layer: 1,
            message: format!(
                "features have {} columns, weight expects {}",
                features.ncols(),
                params.weights[0].nrows()
            ),
        });
    }
    if let Some(&v) = blocks[0].src_ids.iter().find(|&&v| v >= features.nrows()) {
        return Err(Error::Shape {
            layer: 1,
            message: format!("no feature row for node {v}"),
        });
    }

    let mut layers: Vec<LayerCache> = Vec::with_capacity(blocks.len());
    let last = blocks.len() - 1;
    for (l, (block, w)) in blocks.iter().zip(&params.weights).enumerate() {
        let aggregated = match layers.last() {
            // the first block reads feature rows by node id
            None => aggregate(block, features, |s| block.src_ids[s], aggregator),
            Some(prev) if prev.output.nrows() == block.num_src() => {
                aggregate(block, &prev.output, |s| s, aggregator)
            }
            Some(prev) => {
                return Err(Error::Shape {
                    layer: l + 1,
                    message: format!(
                        "block has {} sources but the previous layer emitted {} rows",
                        block.num_src(),
                        prev.output.nrows()
                    ),
                })
            }
        };
        let mut output = aggregated.dot(w);
        if l != last {
            output.mapv_inplace(|z| z.max(0.0));
        }
        layers.push(LayerCache { aggregated, output });
    }
    let cache = ForwardCache {
        layers,
        blocks,
        aggregator,
    };
    Ok((cache.logits().clone(), cache))
}

/// Row-wise softmax with max subtraction.
pub fn softmax(logits: &Array2<f64>) -> Array2<f64> {
    let mut p = logits.clone();
    for mut row in p.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|z| (z - max).exp());
        let sum = row.sum();
        row /= sum;
    }
    p
}

/// Mean softmax cross-entropy, `-(1/N) sum_i log p_i[y_i]`, and the softmax
/// probabilities.
pub fn cross_entropy(logits: &Array2<f64>, labels: &[usize]) -> Result<(f64, Array2<f64>)> {
    if logits.nrows() != labels.len() {
        return Err(Error::Contract(format!(
            "{} logit rows for {} labels",
            logits.nrows(),
            labels.len()
        )));
    }
    let k = logits.ncols();
    let mut total = 0.0;
    for (row, &y) in logits.rows().into_iter().zip(labels) {
        if y >= k {
            return Err(Error::Contract(format!("label {y} outside {k} classes")));
        }
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let lse = max + row.iter().map(|&z| (z - max).exp()).sum::<f64>().ln();
        total += lse - row[y];
    }
    let n = labels.len().max(1) as f64;
    Ok((total / n, softmax(logits)))
}

/// Gradient of the mean cross-entropy with respect to every weight matrix.
pub fn backward(params: &GcnParams, cache: &ForwardCache<'_>, labels: &[usize]) -> Result<Vec<Array2<f64>>> {
    let depth = cache.layers.len();
    if depth != params.depth() {
        return Err(Error::Contract(format!(
            "cache has {depth} layers, model has {}",
            params.depth()
        )));
    }
    let logits = cache.logits();
    if logits.nrows() != labels.len() {
        return Err(Error::Contract(format!(
            "{} outputs for {} labels",
            logits.nrows(),
            labels.len()
        )));
    }

    // dL/dZ for the output layer: (softmax - onehot) / N
    let n = labels.len() as f64;
    let mut grad_pre = softmax(logits);
    for (mut row, &y) in grad_pre.rows_mut().into_iter().zip(labels) {
        row[y] -= 1.0;
        row /= n;
    }

    let mut grads = vec![Array2::zeros((0, 0)); depth];
    for l in (0..depth).rev() {
        let layer = &cache.layers[l];
        grads[l] = layer.aggregated.t().dot(&grad_pre);
        if l == 0 {
            break;
        }
        let grad_agg = grad_pre.dot(&params.weights[l].t());
        let block = &cache.blocks[l];
        let width = grad_agg.ncols();
        let grad_agg = grad_agg.as_standard_layout();
        let ga = grad_agg.as_slice().expect("standard layout");
        let mut grad_input = Array2::<f64>::zeros(cache.layers[l - 1].output.raw_dim());
        let gi = grad_input.as_slice_mut().expect("fresh array");
        for d in 0..block.num_dst() {
            let c = edge_scale(block, d, cache.aggregator);
            let g = &ga[d * width..(d + 1) * width];
            for &(s, _) in block.in_edges(d) {
                for (o, x) in gi[s * width..(s + 1) * width].iter_mut().zip(g) {
                    *o += c * x;
                }
            }
        }
        // Through the ReLU of the layer below: its output is positive
        // exactly where its pre-activation was.
        let below = cache.layers[l - 1].output.as_standard_layout();
        let below = below.as_slice().expect("standard layout");
        for (g, &h) in gi.iter_mut().zip(below) {
            *g = if h > 0.0 { *g } else { 0.0 };
        }
        grad_pre = grad_input;
    }
    Ok(grads)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    #[default]
    Adam,
    Sgd,
}

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub kind: OptimizerKind,
    pub first_moment: Vec<Array2<f64>>,
    pub second_moment: Vec<Array2<f64>>,
    pub step: u64,
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, params: &GcnParams) -> Self {
        OptimizerState {
            kind,
            first_moment: params.zeros_like(),
            second_moment: params.zeros_like(),
            step: 0,
        }
    }
}

/// One optimizer update in place. Non-finite gradients are rejected before
/// anything is modified.
pub fn optimizer_step(
    params: &mut GcnParams,
    grads: &[Array2<f64>],
    state: &mut OptimizerState,
    learning_rate: f64,
) -> Result<()> {
    if grads.len() != params.depth() || state.first_moment.len() != params.depth() {
        return Err(Error::Contract("gradient/parameter count mismatch".into()));
    }
    for (l, (g, w)) in grads.iter().zip(&params.weights).enumerate() {
        if g.dim() != w.dim() {
            return Err(Error::Shape {
                layer: l + 1,
                message: format!("gradient {:?} vs weight {:?}", g.dim(), w.dim()),
            });
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("gradient of layer {}", l + 1)));
        }
    }
    state.step += 1;
    match state.kind {
        OptimizerKind::Sgd => {
            for (w, g) in params.weights.iter_mut().zip(grads) {
                w.scaled_add(-learning_rate, g);
            }
        }
        OptimizerKind::Adam => {
            let t = state.step as i32;
            let c1 = 1.0 - ADAM_BETA1.powi(t);
            let c2 = 1.0 - ADAM_BETA2.powi(t);
            for (((w, g), m), v) in params
                .weights
                .iter_mut()
                .zip(grads)
                .zip(&mut state.first_moment)
                .zip(&mut state.second_moment)
            {
                ndarray::Zip::from(w).and(g).and(m).and(v).for_each(|w, &g, m, v| {
                    *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
                    *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
                    let m_hat = *m / c1;
                    let v_hat = *v / c2;
                    *w -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPS);
                });
            }
        }
    }
    Ok(())
}

/// Arg-max class per row; ties go to the lowest class id.
pub fn predict(logits: &Array2<f64>) -> Vec<usize> {
    logits
        .rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (c, &z)| if z > best.1 { (c, z) } else { best })
                .0
        })
        .collect()
}

/// Micro-averaged F1. With one label per node every false positive is also
/// a false negative, so this is the accuracy.
pub fn micro_f1(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::Contract(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::Contract("micro-F1 of an empty set".into()));
    }
    let tp = predictions.iter().zip(labels).filter(|(p, y)| p == y).count() as f64;
    let fp = labels.len() as f64 - tp;
    let fn_ = fp;
    Ok(2.0 * tp / (2.0 * tp + fp + fn_))
}
