//! Scheduling sensors over unreliable ON/OFF channels to keep channel-aware
//! age low: index and randomized policies, lower bounds, single-sensor MDP
//! oracles and a seeded slotted simulator.

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod metrics;
pub mod policies;
pub mod rng;
pub mod sim;
pub mod system;

pub use error::{Error, Result};
pub use metrics::MetricKind;
pub use system::{Channel, Csi, Observation, ScheduleDecision, SensorSpec, System, SystemSpec};
