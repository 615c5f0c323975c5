//! Training-loop control laws.
//!
//! [`FanoutController`] grows every layer's fanout by `delta_f` whenever the
//! epoch-average loss moves by less than `epsilon` between consecutive
//! epochs. [`EarlyStopper`] halts training once the mini-batch F1 has failed
//! to improve by `delta` over a window of `n` mini-batches, `n` times in a
//! row.

use std::collections::VecDeque;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::FanoutSchedule;

pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanoutController {
    schedule: FanoutSchedule,
    delta_f: usize,
    epsilon: f64,
    prev_loss: Option<f64>,
    /// Optional per-layer ceiling; `None` means unbounded.
    cap: Option<usize>,
}

impl FanoutController {
    pub fn new(initial: FanoutSchedule, delta_f: usize, epsilon: f64) -> Result<Self> {
        if delta_f == 0 {
            return Err(Error::Contract("delta_f must be positive".into()));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Contract(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(FanoutController {
            schedule: initial,
            delta_f,
            epsilon,
            prev_loss: None,
            cap: None,
        })
    }

    pub fn with_cap(mut self, cap: Option<usize>) -> Self {
        self.cap = cap;
        self
    }

    pub fn fanouts(&self) -> &FanoutSchedule {
        &self.schedule
    }

    pub fn prev_loss(&self) -> Option<f64> {
        self.prev_loss
    }

    pub fn delta_f(&self) -> usize {
        self.delta_f
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Feeds one epoch's average loss; returns whether the fanouts grew.
    pub fn observe_epoch_loss(&mut self, loss: f64) -> Result<bool> {
        if !loss.is_finite() {
            return Err(Error::NonFinite(format!("epoch loss {loss}")));
        }
        let plateau = self.prev_loss.is_some_and(|prev| (loss - prev).abs() < self.epsilon);
        self.prev_loss = Some(loss);
        if !plateau {
            return Ok(false);
        }
        let mut changed = false;
        for f in self.schedule.as_mut_slice() {
            let grown = f.saturating_add(self.delta_f);
            let next = self.cap.map_or(grown, |c| grown.min(c.max(*f)));
            changed |= next != *f;
            *f = next;
        }
        Ok(changed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EarlyStopper {
    delta: f64,
    window: usize,
    history: VecDeque<f64>,
    observed: u64,
    consecutive_failures: usize,
}

impl EarlyStopper {
    pub fn new(delta: f64, window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::Contract("window must be positive".into()));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Contract(format!("delta must be positive, got {delta}")));
        }
        Ok(EarlyStopper {
            delta,
            window,
            history: VecDeque::with_capacity(window + 1),
            observed: 0,
            consecutive_failures: 0,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn observed(&self) -> u64 {
        self.observed
    }

    pub fn consecutive_failures(&self) -> usize {
        self.consecutive_failures
    }

    /// Feeds one mini-batch F1; returns whether training should stop.
    pub fn observe_f1(&mut self, f1: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&f1) {
            return Err(Error::Contract(format!("F1 {f1} outside [0, 1]")));
        }
        self.history.push_back(f1);
        if self.history.len() > self.window + 1 {
            self.history.pop_front();
        }
        self.observed += 1;
        if self.history.len() == self.window + 1 {
            let improvement = f1 - self.history[0];
            if improvement < self.delta {
                self.consecutive_failures += 1;
            } else {
                self.consecutive_failures = 0;
            }
        }
        Ok(self.consecutive_failures >= self.window)
    }
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    version: u32,
    kind: String,
    state: T,
}

/// Versioned JSON snapshot shared by the controllers and the trainer
/// checkpoint.
pub trait Snapshot: Serialize + DeserializeOwned {
    const KIND: &'static str;

    fn snapshot(&self) -> String {
        serde_json::to_string(&Envelope {
            version: SNAPSHOT_VERSION,
            kind: Self::KIND.to_string(),
            state: self,
        })
        .expect("state is always serializable")
    }

    fn restore(blob: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            version: u32,
            kind: String,
        }
        let header: Header =
            serde_json::from_str(blob).map_err(|e| Error::Snapshot(format!("corrupt snapshot: {e}")))?;
        if header.version != SNAPSHOT_VERSION {
            return Err(Error::Snapshot(format!(
                "snapshot version {} unsupported (expected {SNAPSHOT_VERSION})",
                header.version
            )));
        }
        if header.kind != Self::KIND {
            return Err(Error::Snapshot(format!(
                "snapshot holds a {}, expected a {}",
                header.kind,
                Self::KIND
            )));
        }
        let env: Envelope<Self> =
            serde_json::from_str(blob).map_err(|e| Error::Snapshot(format!("corrupt snapshot: {e}")))?;
        Ok(env.state)
    }
}

impl Snapshot for FanoutController {
    const KIND: &'static str = "fanout-controller";
}

impl Snapshot for EarlyStopper {
    const KIND: &'static str = "early-stopper";
}
