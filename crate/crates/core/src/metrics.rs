//! Age dynamics and run-level accumulators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{Channel, ScheduleDecision};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    /// Channel-aware age: grows only on ON slots the sensor did not get.
    #[serde(rename = "ca_aoi")]
    CaAoi,
    /// Classic age of information: grows every slot except on delivery.
    #[serde(rename = "aoi")]
    VanillaAoi,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::CaAoi => "ca_aoi",
            MetricKind::VanillaAoi => "aoi",
        }
    }

    #[inline]
    pub fn step(self, age: u64, scheduled: bool, channel: Channel) -> u64 {
        match self {
            MetricKind::CaAoi => ca_aoi_step(age, scheduled, channel),
            MetricKind::VanillaAoi => aoi_step(age, scheduled, channel),
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ca_aoi" | "caaoi" | "ca-aoi" => Ok(MetricKind::CaAoi),
            "aoi" => Ok(MetricKind::VanillaAoi),
            other => Err(Error::InvalidArgument(format!("unknown metric `{other}`"))),
        }
    }
}

#[inline]
pub fn ca_aoi_step(age: u64, scheduled: bool, channel: Channel) -> u64 {
    match (scheduled, channel) {
        (true, Channel::On) => 0,
        (false, Channel::On) => age + 1,
        (_, Channel::Off) => age,
    }
}

#[inline]
pub fn aoi_step(age: u64, scheduled: bool, channel: Channel) -> u64 {
    if scheduled && channel.is_on() {
        0
    } else {
        age + 1
    }
}

/// Running totals for one simulated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunAccumulator {
    pub cum_weighted_age: f64,
    pub successful_updates: u64,
    pub scheduled_counts: Vec<u64>,
    pub slots: u64,
}

impl RunAccumulator {
    pub fn new(n: usize) -> Self {
        Self {
            cum_weighted_age: 0.0,
            successful_updates: 0,
            scheduled_counts: vec![0; n],
            slots: 0,
        }
    }

    /// Adds one slot: the weighted ages counted for this slot, the decision
    /// taken and the channel realizations it met.
    #[inline]
    pub fn accumulate(
        &mut self,
        ages: &[u64],
        decision: ScheduleDecision,
        channels: &[Channel],
        weights: &[f64],
    ) {
        self.cum_weighted_age += ages
            .iter()
            .zip(weights)
            .map(|(&x, &w)| w * x as f64)
            .sum::<f64>();
        if let Some(i) = decision.scheduled() {
            self.scheduled_counts[i] += 1;
            if channels[i].is_on() {
                self.successful_updates += 1;
            }
        }
        self.slots += 1;
    }

    pub fn finalize(&self) -> Result<RunMetrics> {
        if self.slots == 0 {
            return Err(Error::ZeroSlots);
        }
        let t = self.slots as f64;
        Ok(RunMetrics {
            avg_weighted_age: self.cum_weighted_age / t,
            throughput: self.successful_updates as f64 / t,
            resource_fractions: self
                .scheduled_counts
                .iter()
                .map(|&c| c as f64 / t)
                .collect(),
        })
    }
}

/// Time averages of a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub avg_weighted_age: f64,
    pub throughput: f64,
    pub resource_fractions: Vec<f64>,
}
