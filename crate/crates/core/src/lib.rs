//! Mini-batch GCN training with degree-prioritized seed batching and
//! loss-plateau adaptive fanout.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: CSR adjacency and degree scores.
//! - [`generate`] and [`dataset`]: synthetic graphs and dataset directories.
//! - [`sampler`]: seed ordering, batching and layered neighbor sampling.
//! - [`model`]: the GCN forward pass, softmax cross-entropy, exact
//!   gradients, Adam and micro-F1.
//! - [`controller`]: the fanout growth rule and the F1-window early stopper.
//! - [`trainer`]: the epoch loop, run reports, comparisons and sweeps.
//! - [`cli`]: argument parsing and CSV reports for the `dafos` binary.
//!
//! The `book/` directory holds a longer guide; its code listings are
//! compiled as doctests of this crate.

pub mod cli;
pub mod controller;
pub mod dataset;
pub mod error;
pub mod generate;
pub mod graph;
pub mod model;
pub mod rng;
pub mod sampler;
pub mod trainer;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/graphs.md")]
    struct Graphs;
    #[doc = include_str!("../../../book/src/sampling.md")]
    struct Sampling;
    #[doc = include_str!("../../../book/src/model.md")]
    struct Model;
    #[doc = include_str!("../../../book/src/control.md")]
    struct Control;
    #[doc = include_str!("../../../book/src/training.md")]
    struct Training;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
