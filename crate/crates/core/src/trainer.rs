//! Epoch loop, run reports, policy comparison and sensitivity sweeps.
//!
//! A [`Trainer`] owns the model, optimizer and both controllers. Each epoch
//! orders the training seeds, cuts them into batches, samples blocks, takes
//! one optimizer step per batch and feeds a validation F1 to the early
//! stopper after every step. Under [`Policy::Dafos`] the epoch-average loss
//! then goes to the fanout controller.
//!
//! All randomness comes from [`crate::rng`] substreams keyed by
//! `(seed, epoch, batch, layer)`, so a run is a pure function of its config
//! and dataset apart from the wall-clock columns.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::controller::{EarlyStopper, FanoutController, Snapshot};
use crate::dataset::{DatasetBundle, Split};
use crate::error::{Error, Result};
use crate::graph::{node_scores, NodeId, NodeScores};
use crate::model::{
    backward, cross_entropy, forward, micro_f1, optimizer_step, predict, Aggregator, GcnParams,
    OptimizerKind, OptimizerState,
};
use crate::rng::{self, Purpose};
use crate::sampler::{make_batches, order_seeds, Block, FanoutSchedule, Sampler, SeedOrderPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Degree-ordered warmup plus loss-plateau fanout growth.
    Dafos,
    /// Shuffled seeds and constant fanouts.
    Fixed,
}

impl Policy {
    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Dafos => "dafos",
            Policy::Fixed => "fixed",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dafos" => Ok(Policy::Dafos),
            "fixed" => Ok(Policy::Fixed),
            other => Err(format!("unknown policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub policy: Policy,
    pub initial_fanouts: Vec<usize>,
    pub delta_f: usize,
    pub epsilon: f64,
    /// Minimum F1 gain over a window (δ).
    pub delta: f64,
    /// Early-stop window in mini-batches (n).
    pub window: usize,
    pub warmup_epochs: usize,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub hidden_dim: usize,
    pub learning_rate: f64,
    pub aggregator: Aggregator,
    pub optimizer: OptimizerKind,
    pub seed: u64,
    /// Validation nodes scored after every mini-batch for the stopper.
    pub eval_subsample_cap: usize,
    pub self_loops: bool,
    pub fanout_cap: Option<usize>,
    /// Sample an epoch's blocks on the rayon pool before training on them.
    pub parallel_sampling: bool,
    /// Validation F1 used for time-to-target in summaries.
    pub target_f1: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            policy: Policy::Dafos,
            initial_fanouts: vec![10, 15],
            delta_f: 5,
            epsilon: 0.01,
            delta: 1e-2,
            window: 200,
            warmup_epochs: 3,
            batch_size: 1024,
            max_epochs: 300,
            hidden_dim: 64,
            learning_rate: 0.01,
            aggregator: Aggregator::Mean,
            optimizer: OptimizerKind::Adam,
            seed: 0,
            eval_subsample_cap: 2048,
            self_loops: true,
            fanout_cap: None,
            parallel_sampling: false,
            target_f1: 0.85,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("batch_size", self.batch_size),
            ("max_epochs", self.max_epochs),
            ("hidden_dim", self.hidden_dim),
            ("window", self.window),
            ("delta_f", self.delta_f),
            ("eval_subsample_cap", self.eval_subsample_cap),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("delta", self.delta),
            ("learning_rate", self.learning_rate),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        FanoutSchedule::new(self.initial_fanouts.clone())?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub avg_train_loss: f64,
    /// Full-neighborhood micro-F1 on every validation node after the epoch.
    pub val_f1: f64,
    /// Fanouts used during this epoch.
    pub fanouts: Vec<usize>,
    pub wall_millis: f64,
    /// Part of `wall_millis` spent evaluating.
    pub eval_millis: f64,
    pub cumulative_millis: f64,
    /// Cumulative wall time minus evaluation.
    pub cumulative_train_millis: f64,
    pub minibatches_run: usize,
    pub batch_losses: Vec<f64>,
    /// Validation-subsample F1 after each mini-batch, as fed to the stopper.
    pub batch_f1: Vec<f64>,
}

impl EpochStats {
    pub fn train_millis(&self) -> f64 {
        self.wall_millis - self.eval_millis
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    EarlyStop,
    MaxEpochs,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::EarlyStop => "early-stop",
            StopReason::MaxEpochs => "max-epochs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: TrainConfig,
    pub epochs: Vec<EpochStats>,
    pub stop_reason: StopReason,
    pub total_millis: f64,
    pub total_train_millis: f64,
    pub best_val_f1: f64,
    pub best_epoch: usize,
    /// Test micro-F1 of the parameters from `best_epoch`.
    pub test_f1: f64,
}

impl RunReport {
    /// Copy with every wall-clock field zeroed, for exact comparisons.
    pub fn without_timings(&self) -> RunReport {
        let mut r = self.clone();
        r.total_millis = 0.0;
        r.total_train_millis = 0.0;
        for e in &mut r.epochs {
            e.wall_millis = 0.0;
            e.eval_millis = 0.0;
            e.cumulative_millis = 0.0;
            e.cumulative_train_millis = 0.0;
        }
        r
    }

    /// Training time (evaluation excluded) until validation F1 first reaches
    /// `target`.
    pub fn time_to_target(&self, target: f64) -> Option<f64> {
        self.epochs
            .iter()
            .find(|e| e.val_f1 >= target)
            .map(|e| e.cumulative_train_millis)
    }

    pub fn epoch_ms_median(&self) -> f64 {
        median(&self.epochs.iter().map(EpochStats::train_millis).collect::<Vec<_>>())
    }
}

/// Mutable training state; everything needed to resume at an epoch
/// boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainerState {
    pub params: GcnParams,
    pub optimizer: OptimizerState,
    pub controller: FanoutController,
    pub stopper: EarlyStopper,
    pub epochs_done: usize,
    pub history: Vec<EpochStats>,
    pub best_val_f1: f64,
    pub best_epoch: usize,
    pub best_params: GcnParams,
    pub stopped: Option<StopReason>,
}

/// Checkpoint container: the config plus the trainer state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config: TrainConfig,
    pub state: TrainerState,
}

impl Snapshot for Checkpoint {
    const KIND: &'static str = "trainer-checkpoint";
}

struct EvalSet {
    blocks: Vec<Block>,
    labels: Vec<usize>,
}

impl EvalSet {
    fn build(data: &DatasetBundle, ids: &[NodeId], depth: usize, sampler: Sampler) -> Result<Option<Self>> {
        if ids.is_empty() {
            return Ok(None);
        }
        let blocks = sampler.build_blocks(&data.graph, ids, &FanoutSchedule::full(depth), |_| {
            rng::stream(0, Purpose::Sampling)
        })?;
        let labels = ids.iter().map(|&v| data.labels[v]).collect();
        Ok(Some(EvalSet { blocks, labels }))
    }

    fn f1(&self, data: &DatasetBundle, params: &GcnParams, aggregator: Aggregator) -> Result<f64> {
        let (logits, _) = forward(&self.blocks, &data.features, params, aggregator)?;
        micro_f1(&predict(&logits), &self.labels)
    }
}

pub struct Trainer<'a> {
    config: TrainConfig,
    data: &'a DatasetBundle,
    sampler: Sampler,
    scores: NodeScores,
    train_ids: Vec<NodeId>,
    val: EvalSet,
    val_subsample: EvalSet,
    state: TrainerState,
}

impl<'a> Trainer<'a> {
    pub fn new(config: TrainConfig, data: &'a DatasetBundle) -> Result<Self> {
        config.validate()?;
        let dims = model_dims(&config, data);
        let params = GcnParams::init(&dims, config.seed);
        let fanouts = FanoutSchedule::new(config.initial_fanouts.clone())?;
        let state = TrainerState {
            optimizer: OptimizerState::new(config.optimizer, &params),
            best_params: params.clone(),
            params,
            controller: FanoutController::new(fanouts, config.delta_f, config.epsilon)?
                .with_cap(config.fanout_cap),
            stopper: EarlyStopper::new(config.delta, config.window)?,
            epochs_done: 0,
            history: Vec::new(),
            best_val_f1: f64::NEG_INFINITY,
            best_epoch: 0,
            stopped: None,
        };
        Self::with_state(config, data, state)
    }

    /// Continues from a checkpoint taken at an epoch boundary.
    pub fn resume(checkpoint: Checkpoint, data: &'a DatasetBundle) -> Result<Self> {
        let Checkpoint { config, state } = checkpoint;
        config.validate()?;
        let dims = model_dims(&config, data);
        let fits = state.params.depth() + 1 == dims.len()
            && state
                .params
                .weights
                .iter()
                .zip(dims.windows(2))
                .all(|(w, d)| w.dim() == (d[0], d[1]));
        if !fits {
            return Err(Error::Snapshot("checkpoint parameters do not fit this dataset".into()));
        }
        Self::with_state(config, data, state)
    }

    fn with_state(config: TrainConfig, data: &'a DatasetBundle, state: TrainerState) -> Result<Self> {
        let train_ids = data.ids(Split::Train);
        let val_ids = data.ids(Split::Val);
        if train_ids.is_empty() || val_ids.is_empty() || data.ids(Split::Test).is_empty() {
            return Err(Error::Contract("train, val and test splits must all be non-empty".into()));
        }
        let sampler = Sampler {
            self_loops: config.self_loops,
        };
        let depth = config.initial_fanouts.len();
        let sub_ids = if val_ids.len() <= config.eval_subsample_cap {
            val_ids.clone()
        } else {
            let mut r = rng::stream(config.seed, Purpose::ValSubsample);
            let mut picked: Vec<NodeId> = sample_indices(&mut r, val_ids.len(), config.eval_subsample_cap)
                .into_iter()
                .map(|i| val_ids[i])
                .collect();
            picked.sort_unstable();
            picked
        };
        let val = EvalSet::build(data, &val_ids, depth, sampler)?.expect("val is non-empty");
        let val_subsample = EvalSet::build(data, &sub_ids, depth, sampler)?.expect("val is non-empty");
        Ok(Trainer {
            scores: node_scores(&data.graph),
            sampler,
            train_ids,
            val,
            val_subsample,
            config,
            data,
            state,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn state(&self) -> &TrainerState {
        &self.state
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            config: self.config.clone(),
            state: self.state.clone(),
        }
    }

    pub fn is_finished(&self) -> bool {
        self.state.stopped.is_some()
    }

    fn seed_policy(&self) -> SeedOrderPolicy {
        match self.config.policy {
            Policy::Dafos => SeedOrderPolicy::score_warmup(self.config.warmup_epochs),
            Policy::Fixed => SeedOrderPolicy::shuffle(),
        }
    }

    fn sample_batch(&self, epoch: usize, index: usize, seeds: &[NodeId], fanouts: &FanoutSchedule) -> Result<Vec<Block>> {
        let seed = self.config.seed;
        self.sampler.build_blocks(&self.data.graph, seeds, fanouts, |layer| {
            rng::substream(seed, Purpose::Sampling, epoch as u64, index as u64, layer as u64)
        })
    }

    /// Runs one epoch. Returns its stats and whether training should stop.
    pub fn train_epoch(&mut self) -> Result<(EpochStats, bool)> {
        if let Some(reason) = self.state.stopped {
            return Err(Error::Contract(format!("training already stopped ({})", reason.as_str())));
        }
        let started = Instant::now();
        let mut eval_millis = 0.0;
        let epoch = self.state.epochs_done + 1;
        let cfg = &self.config;

        let mut order_rng = rng::substream(cfg.seed, Purpose::SeedOrder, epoch as u64, 0, 0);
        let order = order_seeds(&self.scores, &self.train_ids, epoch, self.seed_policy(), &mut order_rng);
        let batches = make_batches(&order, cfg.batch_size);
        let fanouts = self.state.controller.fanouts().clone();

        let mut presampled: Vec<Option<Vec<Block>>> = if cfg.parallel_sampling {
            let all: Result<Vec<_>> = batches
                .par_iter()
                .enumerate()
                .map(|(i, b)| self.sample_batch(epoch, i, b, &fanouts))
                .collect();
            all?.into_iter().map(Some).collect()
        } else {
            Vec::new()
        };

        let mut batch_losses = Vec::with_capacity(batches.len());
        let mut batch_f1 = Vec::with_capacity(batches.len());
        let mut stop = false;
        for (i, seeds) in batches.iter().enumerate() {
            let blocks = match presampled.get_mut(i).and_then(Option::take) {
                Some(b) => b,
                None => self.sample_batch(epoch, i, seeds, &fanouts)?,
            };
            let labels: Vec<usize> = seeds.iter().map(|&v| self.data.labels[v]).collect();
            let (logits, cache) = forward(&blocks, &self.data.features, &self.state.params, cfg.aggregator)?;
            let (loss, _) = cross_entropy(&logits, &labels)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!("loss at epoch {epoch}, batch {}", i + 1)));
            }
            let grads = backward(&self.state.params, &cache, &labels)?;
            drop(cache);
            optimizer_step(&mut self.state.params, &grads, &mut self.state.optimizer, cfg.learning_rate)
                .map_err(|e| match e {
                    Error::NonFinite(m) => Error::NonFinite(format!("{m} at epoch {epoch}, batch {}", i + 1)),
                    other => other,
                })?;
            batch_losses.push(loss);

            let t = Instant::now();
            let f1 = self.val_subsample.f1(self.data, &self.state.params, cfg.aggregator)?;
            eval_millis += millis(t);
            batch_f1.push(f1);
            if self.state.stopper.observe_f1(f1)? {
                stop = true;
                break;
            }
        }

        let avg_train_loss = batch_losses.iter().sum::<f64>() / batch_losses.len() as f64;
        let t = Instant::now();
        let val_f1 = self.val.f1(self.data, &self.state.params, cfg.aggregator)?;
        eval_millis += millis(t);
        if val_f1 > self.state.best_val_f1 {
            self.state.best_val_f1 = val_f1;
            self.state.best_epoch = epoch;
            self.state.best_params = self.state.params.clone();
        }

        if !stop && cfg.policy == Policy::Dafos {
            self.state.controller.observe_epoch_loss(avg_train_loss)?;
        }

        let wall_millis = millis(started);
        let (prev_cum, prev_train) = self
            .state
            .history
            .last()
            .map_or((0.0, 0.0), |e| (e.cumulative_millis, e.cumulative_train_millis));
        let stats = EpochStats {
            epoch,
            avg_train_loss,
            val_f1,
            fanouts: fanouts.as_slice().to_vec(),
            wall_millis,
            eval_millis,
            cumulative_millis: prev_cum + wall_millis,
            cumulative_train_millis: prev_train + (wall_millis - eval_millis),
            minibatches_run: batch_losses.len(),
            batch_losses,
            batch_f1,
        };
        self.state.history.push(stats.clone());
        self.state.epochs_done = epoch;
        if stop {
            self.state.stopped = Some(StopReason::EarlyStop);
        } else if epoch >= self.config.max_epochs {
            self.state.stopped = Some(StopReason::MaxEpochs);
        }
        Ok((stats, stop))
    }

    /// Trains until a stop condition, then scores the test split with the
    /// best-validation parameters.
    pub fn run_to_end(mut self) -> Result<RunReport> {
        while !self.is_finished() {
            self.train_epoch()?;
        }
        self.report()
    }

    /// Report for the epochs run so far.
    pub fn report(&self) -> Result<RunReport> {
        let depth = self.config.initial_fanouts.len();
        let test = EvalSet::build(self.data, &self.data.ids(Split::Test), depth, self.sampler)?
            .expect("test is non-empty");
        let test_f1 = test.f1(self.data, &self.state.best_params, self.config.aggregator)?;
        let last = self.state.history.last();
        Ok(RunReport {
            config: self.config.clone(),
            epochs: self.state.history.clone(),
            stop_reason: self.state.stopped.unwrap_or(StopReason::MaxEpochs),
            total_millis: last.map_or(0.0, |e| e.cumulative_millis),
            total_train_millis: last.map_or(0.0, |e| e.cumulative_train_millis),
            best_val_f1: self.state.best_val_f1.max(0.0),
            best_epoch: self.state.best_epoch,
            test_f1,
        })
    }
}

fn model_dims(config: &TrainConfig, data: &DatasetBundle) -> Vec<usize> {
    let depth = config.initial_fanouts.len();
    let mut dims = vec![data.feat_dim()];
    dims.extend(std::iter::repeat_n(config.hidden_dim, depth - 1));
    dims.push(data.num_classes());
    dims
}

fn millis(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub(crate) fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

/// Median where `None` (target never reached) ranks above every value.
fn median_opt(values: &[Option<f64>]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        Some((v[mid - 1]? + v[mid]?) / 2.0)
    }
}

/// Trains one model from scratch.
pub fn run(config: &TrainConfig, data: &DatasetBundle) -> Result<RunReport> {
    Trainer::new(config.clone(), data)?.run_to_end()
}

/// One line of `summary.csv`. `seed` is `None` on per-config aggregate rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub policy: String,
    pub seed: Option<u64>,
    pub epoch_ms_median: f64,
    pub total_ms: f64,
    pub best_val_f1: f64,
    pub test_f1: f64,
    pub time_to_target_ms: Option<f64>,
}

impl SummaryRow {
    pub fn from_report(label: &str, report: &RunReport) -> Self {
        SummaryRow {
            policy: label.to_string(),
            seed: Some(report.config.seed),
            epoch_ms_median: report.epoch_ms_median(),
            total_ms: report.total_millis,
            best_val_f1: report.best_val_f1,
            test_f1: report.test_f1,
            time_to_target_ms: report.time_to_target(report.config.target_f1),
        }
    }

    fn aggregate(label: &str, rows: &[SummaryRow]) -> Self {
        let col = |f: fn(&SummaryRow) -> f64| median(&rows.iter().map(f).collect::<Vec<_>>());
        SummaryRow {
            policy: label.to_string(),
            seed: None,
            epoch_ms_median: col(|r| r.epoch_ms_median),
            total_ms: col(|r| r.total_ms),
            best_val_f1: col(|r| r.best_val_f1),
            test_f1: col(|r| r.test_f1),
            time_to_target_ms: median_opt(&rows.iter().map(|r| r.time_to_target_ms).collect::<Vec<_>>()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    /// One aggregate (median over seeds) row per config, in config order.
    pub aggregate: Vec<SummaryRow>,
    /// One row per (config, seed).
    pub raw: Vec<SummaryRow>,
    pub reports: Vec<(String, RunReport)>,
}

/// Runs every labelled config once per seed. Each run's seed overrides the
/// config's own. Runs are interleaved seed by seed so slow drift in machine
/// speed lands on every config alike; rows and reports stay grouped by
/// config.
pub fn compare(configs: &[(String, TrainConfig)], data: &DatasetBundle, seeds: &[u64]) -> Result<Comparison> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("compare needs at least one seed".into()));
    }
    let mut by_config: Vec<Vec<RunReport>> = vec![Vec::with_capacity(seeds.len()); configs.len()];
    for &seed in seeds {
        for ((_, config), runs) in configs.iter().zip(&mut by_config) {
            let cfg = TrainConfig {
                seed,
                ..config.clone()
            };
            runs.push(run(&cfg, data)?);
        }
    }
    let mut aggregate = Vec::with_capacity(configs.len());
    let mut raw = Vec::new();
    let mut reports = Vec::new();
    for ((label, _), runs) in configs.iter().zip(by_config) {
        let rows: Vec<SummaryRow> = runs.iter().map(|r| SummaryRow::from_report(label, r)).collect();
        aggregate.push(SummaryRow::aggregate(label, &rows));
        raw.extend(rows);
        reports.extend(runs.into_iter().map(|r| (label.clone(), r)));
    }
    Ok(Comparison {
        aggregate,
        raw,
        reports,
    })
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub delta_f: usize,
    pub epsilon: f64,
    pub total_ms: f64,
    /// Test micro-F1 at the best-validation checkpoint.
    pub f1: f64,
    pub report: RunReport,
}

/// The eight `(delta_f, epsilon)` cells of the reference sensitivity table:
/// `{5} x {1e-4, 1e-3, 2e-3, 5e-3}` then `{3, 5, 7, 9} x {1e-2}`.
pub fn reference_sweep_cells() -> Vec<(usize, f64)> {
    let mut cells: Vec<_> = [1e-4, 1e-3, 2e-3, 5e-3].into_iter().map(|e| (5, e)).collect();
    cells.extend([3, 5, 7, 9].into_iter().map(|d| (d, 1e-2)));
    cells
}

/// Full cartesian grid.
pub fn grid_cells(delta_f_values: &[usize], epsilon_values: &[f64]) -> Vec<(usize, f64)> {
    delta_f_values
        .iter()
        .flat_map(|&d| epsilon_values.iter().map(move |&e| (d, e)))
        .collect()
}

/// One DAFOS run per cell.
pub fn sensitivity_sweep(base: &TrainConfig, cells: &[(usize, f64)], data: &DatasetBundle) -> Result<Vec<SweepRow>> {
    if cells.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one cell".into()));
    }
    cells
        .iter()
        .map(|&(delta_f, epsilon)| {
            let cfg = TrainConfig {
                policy: Policy::Dafos,
                delta_f,
                epsilon,
                ..base.clone()
            };
            let report = run(&cfg, data)?;
            Ok(SweepRow {
                delta_f,
                epsilon,
                total_ms: report.total_millis,
                f1: report.test_f1,
                report,
            })
        })
        .collect()
}

/// Recomputes the fanout trajectory a report should show from its logged
/// epoch losses.
pub fn replay_fanouts(report: &RunReport) -> Result<Vec<Vec<usize>>> {
    let cfg = &report.config;
    let mut c = FanoutController::new(FanoutSchedule::new(cfg.initial_fanouts.clone())?, cfg.delta_f, cfg.epsilon)?
        .with_cap(cfg.fanout_cap);
    let mut out = Vec::with_capacity(report.epochs.len());
    for e in &report.epochs {
        out.push(c.fanouts().as_slice().to_vec());
        if cfg.policy == Policy::Dafos {
            c.observe_epoch_loss(e.avg_train_loss)?;
        }
    }
    Ok(out)
}
