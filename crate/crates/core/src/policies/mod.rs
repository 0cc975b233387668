//! Scheduling policies behind a single decision interface.

mod greedy;
mod randomized;
mod whittle;

pub use greedy::{GreedyPolicy, MaxThroughputPolicy};
pub use randomized::{
    closed_form_cost, solve_randomized_csi, solve_randomized_no_csi, solve_randomized_partial,
    RandomizedParams, RandomizedPolicy,
};
pub use whittle::{whittle_index_csi, whittle_index_no_csi, IndexSource, WhittlePolicy};

use rand_chacha::ChaCha8Rng;

use crate::rng::{substream, Purpose};
use crate::system::{Observation, ScheduleDecision};

/// Per-sensor randomization streams handed to [`Policy::decide`].
#[derive(Debug, Clone)]
pub struct DecisionRng {
    streams: Vec<ChaCha8Rng>,
}

impl DecisionRng {
    pub fn new(key: u64, n: usize) -> Self {
        Self {
            streams: (0..n as u64)
                .map(|i| substream(key, Purpose::Decision, i))
                .collect(),
        }
    }

    #[inline]
    pub fn sensor(&mut self, i: usize) -> &mut ChaCha8Rng {
        &mut self.streams[i]
    }
}

pub trait Policy: Send {
    /// Picks at most one sensor from what the observation exposes.
    fn decide(&mut self, obs: &Observation<'_>, rng: &mut DecisionRng) -> ScheduleDecision;

    fn reset(&mut self) {}

    fn name(&self) -> &'static str;
}

/// Highest score wins; ties go to the lowest index.
#[inline]
pub(crate) fn argmax_lowest(scores: impl Iterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores {
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best
}
