//! The `dafos` command line: dataset generation, single runs, policy
//! comparisons and sensitivity sweeps. Every result is written as CSV.
//!
//! Exit codes: 0 success, 2 usage error, 3 runtime failure. `DAFOS_SEED`
//! overrides `--seed`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::controller::Snapshot;
use crate::dataset::{load_dataset_with, read_edge_list_remapped, save_dataset, save_node_ids, DatasetBundle};
use crate::error::{Error, Result};
use crate::generate::{gen_homophilous_attachment, gen_planted_features, gen_sbm, random_split};
use crate::graph::CsrGraph;
use crate::model::{Aggregator, OptimizerKind};
use crate::trainer::{
    compare, grid_cells, reference_sweep_cells, sensitivity_sweep, Policy, RunReport, SummaryRow, SweepRow,
    TrainConfig, Trainer,
};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const SEED_ENV: &str = "DAFOS_SEED";

pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const ECHO_FILE: &str = "config.echo.json";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";

/// Hidden width used when neither `--hidden` nor `--paper-scale` is given.
pub const DESK_HIDDEN: usize = 64;
pub const FULL_HIDDEN: usize = 256;

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "dafos", version, about = "Adaptive-fanout mini-batch GCN training", arg_required_else_help = true)]
pub struct CliInvocation {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset directory.
    GenData(GenDataArgs),
    /// Train one model and write its convergence curve.
    Train(RunArgs),
    /// Compare DAFOS against the fixed-fanout baseline over several seeds.
    Compare(CompareArgs),
    /// Run one DAFOS training per (delta-f, epsilon) cell.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    /// Stochastic block model.
    Sbm,
    /// Preferential attachment with planted classes.
    Pa,
    /// Import an edge list with arbitrary node names.
    EdgeList,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct GenDataArgs {
    #[arg(long, value_enum)]
    pub kind: GraphKind,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2000, value_parser = positive)]
    pub nodes: usize,
    #[arg(long, default_value_t = 4, value_parser = positive)]
    pub blocks: usize,
    #[arg(long, default_value_t = 0.02)]
    pub p_intra: f64,
    #[arg(long, default_value_t = 0.002)]
    pub p_inter: f64,
    /// Links per arriving node (pa).
    #[arg(long, default_value_t = 3, value_parser = positive)]
    pub m: usize,
    /// Probability a link stays inside the node's class (pa).
    #[arg(long, default_value_t = 0.8)]
    pub homophily: f64,
    #[arg(long, default_value_t = 16, value_parser = positive)]
    pub feat_dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0.6)]
    pub train_frac: f64,
    #[arg(long, default_value_t = 0.2)]
    pub val_frac: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge list to import (edge-list).
    #[arg(long, required_if_eq("kind", "edge-list"))]
    pub edges: Option<PathBuf>,
    /// `name label` lines for every node of the edge list (edge-list).
    #[arg(long, required_if_eq("kind", "edge-list"))]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct TrainArgs {
    #[arg(long, default_value_t = Policy::Dafos, value_parser = parse_policy)]
    pub policy: Policy,
    /// Initial per-layer fanouts, comma separated.
    #[arg(long, default_value = "10,15", value_parser = parse_fanouts)]
    pub fanouts: Fanouts,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    pub delta_f: usize,
    #[arg(long, default_value_t = 0.01, value_parser = positive_real)]
    pub epsilon: f64,
    /// Minimum F1 gain over the early-stop window.
    #[arg(long, default_value_t = 0.01, value_parser = positive_real)]
    pub delta: f64,
    /// Early-stop window in mini-batches.
    #[arg(long, default_value_t = 200, value_parser = positive)]
    pub window: usize,
    #[arg(long, default_value_t = 3)]
    pub warmup_epochs: usize,
    #[arg(long, default_value_t = 1024, value_parser = positive)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 300, value_parser = positive)]
    pub max_epochs: usize,
    /// Hidden width; defaults to 64, or 256 with --paper-scale.
    #[arg(long, value_parser = positive)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub paper_scale: bool,
    #[arg(long, default_value_t = 0.01, value_parser = positive_real)]
    pub lr: f64,
    #[arg(long, value_enum, default_value_t = AggregatorArg::Mean)]
    pub aggregator: AggregatorArg,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    pub optimizer: OptimizerArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Validation nodes scored after each mini-batch for early stopping.
    #[arg(long, default_value_t = 2048, value_parser = positive)]
    pub eval_cap: usize,
    #[arg(long)]
    pub no_self_loop: bool,
    #[arg(long, value_parser = positive)]
    pub fanout_cap: Option<usize>,
    #[arg(long)]
    pub parallel_sampling: bool,
    /// Validation F1 that defines time-to-target.
    #[arg(long, default_value_t = 0.85)]
    pub target_f1: f64,
    /// Keep dataset edges directed instead of symmetrizing them.
    #[arg(long)]
    pub directed: bool,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub train: TrainArgs,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Fanouts of the fixed-fanout baseline.
    #[arg(long, default_value = "25,25", value_parser = parse_fanouts)]
    pub baseline_fanouts: Fanouts,
    #[arg(long, default_value = "0,1,2,3,4", value_parser = parse_seeds)]
    pub seeds: Seeds,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Delta-f values; with --epsilon-values runs the full grid instead of
    /// the eight reference cells.
    #[arg(long, value_parser = parse_fanouts, requires = "epsilon_values")]
    pub delta_f_values: Option<Fanouts>,
    #[arg(long, value_parser = parse_reals, requires = "delta_f_values")]
    pub epsilon_values: Option<Reals>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregatorArg {
    Mean,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerArg {
    Adam,
    Sgd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fanouts(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seeds(pub Vec<u64>);

#[derive(Debug, Clone, PartialEq)]
pub struct Reals(pub Vec<f64>);

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(_) => Err(format!("{s:?} is not a non-negative integer")),
    }
}

fn positive_real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(_) => Err("must be a positive number".into()),
        Err(_) => Err(format!("{s:?} is not a number")),
    }
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse()
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let v: Vec<T> = s.split(',').map(|x| item(x.trim())).collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(v)
}

fn parse_fanouts(s: &str) -> Result<Fanouts, String> {
    parse_list(s, positive).map(Fanouts)
}

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    parse_list(s, |x| x.parse::<u64>().map_err(|_| format!("{x:?} is not a seed"))).map(Seeds)
}

fn parse_reals(s: &str) -> Result<Reals, String> {
    parse_list(s, positive_real).map(Reals)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Parses a full argv (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<CliInvocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    CliInvocation::try_parse_from(argv)
}

impl CliInvocation {
    /// Applies a `DAFOS_SEED` value on top of `--seed`.
    pub fn apply_seed_env(&mut self, value: Option<&str>) -> Result<(), String> {
        let Some(v) = value else { return Ok(()) };
        let seed: u64 = v
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV}={v:?} is not an integer seed"))?;
        match &mut self.command {
            Command::GenData(a) => a.seed = seed,
            Command::Train(a) => a.train.seed = seed,
            Command::Compare(a) => a.run.train.seed = seed,
            Command::Sweep(a) => a.run.train.seed = seed,
        }
        Ok(())
    }

    /// An argv that parses back to exactly this invocation.
    pub fn to_argv(&self) -> Vec<String> {
        let mut out = vec!["dafos".to_string()];
        let mut flag = |name: &str, value: String| {
            out.push(format!("--{name}"));
            out.push(value);
        };
        match &self.command {
            Command::GenData(a) => {
                let kind = a.kind.to_possible_value().expect("no skipped variants");
                flag("kind", kind.get_name().to_string());
                flag("out", a.out.display().to_string());
                flag("nodes", a.nodes.to_string());
                flag("blocks", a.blocks.to_string());
                flag("p-intra", a.p_intra.to_string());
                flag("p-inter", a.p_inter.to_string());
                flag("m", a.m.to_string());
                flag("homophily", a.homophily.to_string());
                flag("feat-dim", a.feat_dim.to_string());
                flag("noise", a.noise.to_string());
                flag("train-frac", a.train_frac.to_string());
                flag("val-frac", a.val_frac.to_string());
                flag("seed", a.seed.to_string());
                if let Some(p) = &a.edges {
                    flag("edges", p.display().to_string());
                }
                if let Some(p) = &a.labels {
                    flag("labels", p.display().to_string());
                }
                out.insert(1, "gen-data".into());
            }
            Command::Train(a) => {
                push_run(&mut flag, a);
                let mut bools = train_bools(&a.train);
                out.insert(1, "train".into());
                out.append(&mut bools);
            }
            Command::Compare(a) => {
                push_run(&mut flag, &a.run);
                flag("baseline-fanouts", join(&a.baseline_fanouts.0));
                flag("seeds", join(&a.seeds.0));
                let mut bools = train_bools(&a.run.train);
                out.insert(1, "compare".into());
                out.append(&mut bools);
            }
            Command::Sweep(a) => {
                push_run(&mut flag, &a.run);
                if let (Some(d), Some(e)) = (&a.delta_f_values, &a.epsilon_values) {
                    flag("delta-f-values", join(&d.0));
                    flag("epsilon-values", join(&e.0));
                }
                let mut bools = train_bools(&a.run.train);
                out.insert(1, "sweep".into());
                out.append(&mut bools);
            }
        }
        out
    }
}

fn push_run(flag: &mut impl FnMut(&str, String), a: &RunArgs) {
    let t = &a.train;
    flag("dataset", a.dataset.display().to_string());
    flag("out", a.out.display().to_string());
    flag("policy", t.policy.to_string());
    flag("fanouts", join(&t.fanouts.0));
    flag("delta-f", t.delta_f.to_string());
    flag("epsilon", t.epsilon.to_string());
    flag("delta", t.delta.to_string());
    flag("window", t.window.to_string());
    flag("warmup-epochs", t.warmup_epochs.to_string());
    flag("batch-size", t.batch_size.to_string());
    flag("max-epochs", t.max_epochs.to_string());
    if let Some(h) = t.hidden {
        flag("hidden", h.to_string());
    }
    flag("lr", t.lr.to_string());
    let agg = t.aggregator.to_possible_value().expect("no skipped variants");
    flag("aggregator", agg.get_name().to_string());
    let opt = t.optimizer.to_possible_value().expect("no skipped variants");
    flag("optimizer", opt.get_name().to_string());
    flag("seed", t.seed.to_string());
    flag("eval-cap", t.eval_cap.to_string());
    if let Some(c) = t.fanout_cap {
        flag("fanout-cap", c.to_string());
    }
    flag("target-f1", t.target_f1.to_string());
}

fn train_bools(t: &TrainArgs) -> Vec<String> {
    [
        ("--paper-scale", t.paper_scale),
        ("--no-self-loop", t.no_self_loop),
        ("--parallel-sampling", t.parallel_sampling),
        ("--directed", t.directed),
    ]
    .into_iter()
    .filter(|(_, on)| *on)
    .map(|(f, _)| f.to_string())
    .collect()
}

impl TrainArgs {
    pub fn to_config(&self) -> TrainConfig {
        let hidden_default = if self.paper_scale { FULL_HIDDEN } else { DESK_HIDDEN };
        TrainConfig {
            policy: self.policy,
            initial_fanouts: self.fanouts.0.clone(),
            delta_f: self.delta_f,
            epsilon: self.epsilon,
            delta: self.delta,
            window: self.window,
            warmup_epochs: self.warmup_epochs,
            batch_size: self.batch_size,
            max_epochs: self.max_epochs,
            hidden_dim: self.hidden.unwrap_or(hidden_default),
            learning_rate: self.lr,
            aggregator: match self.aggregator {
                AggregatorArg::Mean => Aggregator::Mean,
                AggregatorArg::Sum => Aggregator::Sum,
            },
            optimizer: match self.optimizer {
                OptimizerArg::Adam => OptimizerKind::Adam,
                OptimizerArg::Sgd => OptimizerKind::Sgd,
            },
            seed: self.seed,
            eval_subsample_cap: self.eval_cap,
            self_loops: !self.no_self_loop,
            fanout_cap: self.fanout_cap,
            parallel_sampling: self.parallel_sampling,
            target_f1: self.target_f1,
        }
    }
}

fn write_file(path: &Path, text: String) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// `epoch,cum_ms,avg_loss,val_f1,fanout_l1,fanout_l2` (one fanout column
/// per layer).
pub fn convergence_csv(report: &RunReport) -> String {
    let depth = report.config.initial_fanouts.len();
    let mut out = String::from("epoch,cum_ms,avg_loss,val_f1");
    for l in 1..=depth {
        write!(out, ",fanout_l{l}").unwrap();
    }
    out.push('\n');
    for e in &report.epochs {
        write!(out, "{},{:.3},{},{}", e.epoch, e.cumulative_millis, e.avg_train_loss, e.val_f1).unwrap();
        for f in &e.fanouts {
            write!(out, ",{f}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub const SUMMARY_HEADER: &str = "policy,seed,epoch_ms_median,total_ms,best_val_f1,test_f1,time_to_target_ms";

/// Aggregate rows (seed column `median`) come first, then one raw row per
/// run. An unreached target leaves `time_to_target_ms` empty.
pub fn summary_csv(aggregate: &[SummaryRow], raw: &[SummaryRow]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in aggregate.iter().chain(raw) {
        let seed = r.seed.map_or_else(|| "median".to_string(), |s| s.to_string());
        let ttt = r.time_to_target_ms.map_or_else(String::new, |t| format!("{t:.3}"));
        writeln!(
            out,
            "{},{seed},{:.3},{:.3},{},{},{ttt}",
            r.policy, r.epoch_ms_median, r.total_ms, r.best_val_f1, r.test_f1
        )
        .unwrap();
    }
    out
}

pub const SWEEP_HEADER: &str = "delta_f,epsilon,total_ms,f1";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        writeln!(out, "{},{},{:.3},{}", r.delta_f, r.epsilon, r.total_ms, r.f1).unwrap();
    }
    out
}

#[derive(Serialize)]
struct Echo<'a> {
    argv: Vec<String>,
    config: Option<&'a TrainConfig>,
}

fn write_echo(inv: &CliInvocation, config: Option<&TrainConfig>, out: &Path) -> Result<()> {
    let echo = Echo {
        argv: inv.to_argv(),
        config,
    };
    write_file(&out.join(ECHO_FILE), serde_json::to_string_pretty(&echo).expect("serializable") + "\n")
}

/// Writes a single run's `convergence.csv` and one-row `summary.csv`.
pub fn emit_run(report: &RunReport, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    write_file(&out.join(CONVERGENCE_FILE), convergence_csv(report))?;
    let row = SummaryRow::from_report(report.config.policy.as_str(), report);
    write_file(&out.join(SUMMARY_FILE), summary_csv(&[], &[row]))
}

fn load(run: &RunArgs) -> Result<DatasetBundle> {
    let symmetrize = run.train.directed.then_some(false);
    load_dataset_with(&run.dataset, symmetrize)
}

fn gen_data(a: &GenDataArgs) -> Result<()> {
    let (graph, blocks, names): (CsrGraph, Vec<usize>, Option<Vec<String>>) = match a.kind {
        GraphKind::Sbm => {
            let (g, b) = gen_sbm(a.nodes, a.blocks, a.p_intra, a.p_inter, a.seed)?;
            (g, b, None)
        }
        GraphKind::Pa => {
            let (g, b) = gen_homophilous_attachment(a.nodes, a.m, a.blocks, a.homophily, a.seed)?;
            (g, b, None)
        }
        GraphKind::EdgeList => {
            let edges_path = a.edges.as_ref().expect("clap requires --edges");
            let labels_path = a.labels.as_ref().expect("clap requires --labels");
            let (edges, names) = read_edge_list_remapped(edges_path)?;
            let index: std::collections::HashMap<&str, usize> =
                names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
            let text = fs::read_to_string(labels_path).map_err(|e| Error::io(labels_path, e))?;
            let mut labels = vec![None; names.len()];
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let parse_err = |message: String| Error::Parse {
                    path: labels_path.clone(),
                    line: i + 1,
                    message,
                };
                let mut parts = line.split_whitespace();
                let (Some(name), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(parse_err("expected `name label`".into()));
                };
                let label: usize = label.parse().map_err(|_| parse_err(format!("bad label {label:?}")))?;
                if let Some(&v) = index.get(name) {
                    labels[v] = Some(label);
                }
            }
            if let Some(v) = labels.iter().position(Option::is_none) {
                return Err(Error::InvalidParameter(format!("node {:?} has no label", names[v])));
            }
            let g = CsrGraph::from_edges(&edges, names.len(), true)?;
            (g, labels.into_iter().map(Option::unwrap).collect(), Some(names))
        }
    };
    let (features, labels) = gen_planted_features(&graph, &blocks, a.feat_dim, a.noise, a.seed)?;
    let split = random_split(graph.num_nodes(), a.train_frac, a.val_frac, a.seed)?;
    let bundle = DatasetBundle::new(graph, features, labels, split)?;
    save_dataset(&bundle, &a.out)?;
    if let Some(names) = names {
        save_node_ids(&names, &a.out)?;
    }
    Ok(())
}

/// Executes a parsed invocation.
pub fn execute(inv: &CliInvocation) -> Result<()> {
    match &inv.command {
        Command::GenData(a) => {
            gen_data(a)?;
            write_echo(inv, None, &a.out)
        }
        Command::Train(a) => {
            let data = load(a)?;
            let config = a.train.to_config();
            ensure_dir(&a.out)?;
            write_echo(inv, Some(&config), &a.out)?;
            let mut trainer = Trainer::new(config, &data)?;
            while !trainer.is_finished() {
                trainer.train_epoch()?;
            }
            write_file(&a.out.join(CHECKPOINT_FILE), trainer.checkpoint().snapshot() + "\n")?;
            emit_run(&trainer.report()?, &a.out)
        }
        Command::Compare(a) => {
            let data = load(&a.run)?;
            let dafos = TrainConfig {
                policy: Policy::Dafos,
                ..a.run.train.to_config()
            };
            let fixed = TrainConfig {
                policy: Policy::Fixed,
                initial_fanouts: a.baseline_fanouts.0.clone(),
                ..a.run.train.to_config()
            };
            ensure_dir(&a.run.out)?;
            write_echo(inv, Some(&dafos), &a.run.out)?;
            let configs = [("dafos".to_string(), dafos), ("fixed".to_string(), fixed)];
            let cmp = compare(&configs, &data, &a.seeds.0)?;
            for (label, report) in &cmp.reports {
                let name = format!("convergence_{label}_seed{}.csv", report.config.seed);
                write_file(&a.run.out.join(name), convergence_csv(report))?;
            }
            write_file(&a.run.out.join(SUMMARY_FILE), summary_csv(&cmp.aggregate, &cmp.raw))
        }
        Command::Sweep(a) => {
            let data = load(&a.run)?;
            let base = a.run.train.to_config();
            let cells = match (&a.delta_f_values, &a.epsilon_values) {
                (Some(d), Some(e)) => grid_cells(&d.0, &e.0),
                _ => reference_sweep_cells(),
            };
            ensure_dir(&a.run.out)?;
            write_echo(inv, Some(&base), &a.run.out)?;
            let rows = sensitivity_sweep(&base, &cells, &data)?;
            for r in &rows {
                let name = format!("convergence_df{}_eps{}.csv", r.delta_f, r.epsilon);
                write_file(&a.run.out.join(name), convergence_csv(&r.report))?;
            }
            write_file(&a.run.out.join(SWEEP_FILE), sweep_csv(&rows))
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut inv = match parse_args(argv) {
        Ok(inv) => inv,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    if let Err(msg) = inv.apply_seed_env(std::env::var(SEED_ENV).ok().as_deref()) {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    match execute(&inv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}
