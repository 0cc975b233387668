//! Slotted simulator and parameter sweeps.
//!
//! Every slot draws each sensor's channel from its own stream, shows the
//! policy what its CSI allows, applies the decision, and counts the weighted
//! ages the slot leaves behind. A run of `T` slots therefore averages
//! `X(1), …, X(T)` with all ages starting at zero. Both age processes are
//! tracked so a policy built for one metric can be scored on the other.

use std::str::FromStr;

use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::lower_bound_partial;
use crate::error::{Error, Result};
use crate::metrics::{aoi_step, ca_aoi_step, MetricKind, RunAccumulator, RunMetrics};
use crate::policies::{
    DecisionRng, GreedyPolicy, MaxThroughputPolicy, Policy, RandomizedParams, RandomizedPolicy,
    WhittlePolicy,
};
use crate::rng::{labelled_key, replication_key, substream, Purpose};
use crate::system::{Channel, Csi, Observation, ScheduleDecision, SensorSpec, System, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Whittle,
    Randomized,
    /// Greedy that never picks a Known-CSI sensor seen OFF.
    Greedy,
    /// Greedy that scores Known-CSI sensors by weighted age whatever the channel.
    GreedyAny,
    MaxThroughput,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::Whittle,
        PolicyKind::Randomized,
        PolicyKind::Greedy,
        PolicyKind::GreedyAny,
        PolicyKind::MaxThroughput,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Whittle => "whittle",
            PolicyKind::Randomized => "randomized",
            PolicyKind::Greedy => "greedy",
            PolicyKind::GreedyAny => "greedy_any",
            PolicyKind::MaxThroughput => "max_throughput",
        }
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown policy `{s}`")))
    }
}

/// Which policy to build, and which age it is tuned for.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Age process the policy looks at; only the Whittle policy has a
    /// variant per metric. Defaults to the evaluation metric.
    pub target: Option<MetricKind>,
    /// Fixed randomized parameters instead of the optimal ones.
    pub params: Option<RandomizedParams>,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            target: None,
            params: None,
        }
    }

    pub fn targeting(mut self, target: MetricKind) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_params(mut self, params: RandomizedParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn target_for(&self, metric: MetricKind) -> MetricKind {
        self.target.unwrap_or(metric)
    }

    /// `kind`, or `kind[target]` when the policy is tuned for another metric.
    pub fn label(&self, metric: MetricKind) -> String {
        match self.target {
            Some(t) if t != metric => format!("{}[{}]", self.kind.as_str(), t.as_str()),
            _ => self.kind.as_str().to_string(),
        }
    }

    pub fn build(&self, system: &System, metric: MetricKind) -> Result<Box<dyn Policy>> {
        if self.params.is_some() && self.kind != PolicyKind::Randomized {
            return Err(Error::PolicySpecMismatch(format!(
                "{} takes no randomized parameters",
                self.kind.as_str()
            )));
        }
        let target = self.target_for(metric);
        // randomized and greedy are built for CA-AoI only; max-throughput ignores ages
        let fixed = matches!(
            self.kind,
            PolicyKind::Randomized | PolicyKind::Greedy | PolicyKind::GreedyAny
        );
        if let Some(t) = self.target.filter(|&t| fixed && t != MetricKind::CaAoi) {
            return Err(Error::PolicySpecMismatch(format!(
                "{} has no variant tuned for {}",
                self.kind.as_str(),
                t.as_str()
            )));
        }
        Ok(match self.kind {
            PolicyKind::Whittle => Box::new(WhittlePolicy::new(system, target)?),
            PolicyKind::Randomized => match &self.params {
                Some(params) => Box::new(
                    RandomizedPolicy::new(params, system)
                        .map_err(|e| Error::PolicySpecMismatch(e.to_string()))?,
                ),
                None => Box::new(RandomizedPolicy::optimal(system)?.0),
            },
            PolicyKind::Greedy => Box::new(GreedyPolicy::new(system, true)),
            PolicyKind::GreedyAny => Box::new(GreedyPolicy::new(system, false)),
            PolicyKind::MaxThroughput => Box::new(MaxThroughputPolicy::new(system)),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub system: SystemSpec,
    pub policy: PolicySpec,
    /// Age process being scored.
    pub metric: MetricKind,
    pub horizon: u64,
    pub seed: u64,
    pub replications: u32,
}

pub const DEFAULT_HORIZON: u64 = 1_000_000;
pub const DEFAULT_REPLICATIONS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub avg_weighted_age: f64,
    /// Sample standard deviation across replications over `√reps`.
    pub std_error: f64,
    pub throughput: f64,
    pub resource_fractions: Vec<f64>,
    /// Replication keys, one per replication.
    pub seeds_used: Vec<u64>,
    /// Per-replication time averages, in replication order.
    pub replicate_costs: Vec<f64>,
}

/// Per-sensor channel source for one replication.
#[derive(Debug, Clone)]
pub(crate) struct ChannelSource {
    streams: Vec<(ChaCha8Rng, Bernoulli)>,
}

impl ChannelSource {
    pub(crate) fn new(key: u64, probs: &[f64]) -> Self {
        Self {
            streams: probs
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    let dist = Bernoulli::new(p).expect("validated probability");
                    (substream(key, Purpose::Channel, i as u64), dist)
                })
                .collect(),
        }
    }

    #[inline]
    pub(crate) fn draw(&mut self, out: &mut [Channel]) {
        for (c, (rng, dist)) in out.iter_mut().zip(&mut self.streams) {
            *c = Channel::from_on(dist.sample(rng));
        }
    }
}

/// One trajectory, advanced a slot at a time.
pub struct Trajectory<'a> {
    system: &'a System,
    target: MetricKind,
    metric: MetricKind,
    source: ChannelSource,
    decisions: DecisionRng,
    pub(crate) ca_aoi: Vec<u64>,
    pub(crate) aoi: Vec<u64>,
    pub(crate) channels: Vec<Channel>,
    acc: RunAccumulator,
}

impl<'a> Trajectory<'a> {
    /// `target` is the age the policy sees, `metric` the age being scored.
    pub fn new(system: &'a System, target: MetricKind, metric: MetricKind, key: u64) -> Self {
        let n = system.len();
        Self {
            system,
            target,
            metric,
            source: ChannelSource::new(key, system.probs()),
            decisions: DecisionRng::new(key, n),
            ca_aoi: vec![0; n],
            aoi: vec![0; n],
            channels: vec![Channel::Off; n],
            acc: RunAccumulator::new(n),
        }
    }

    pub fn ages(&self, metric: MetricKind) -> &[u64] {
        match metric {
            MetricKind::CaAoi => &self.ca_aoi,
            MetricKind::VanillaAoi => &self.aoi,
        }
    }

    /// Realizations of the last slot.
    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    #[cfg(test)]
    pub(crate) fn observation(&self) -> Observation<'_> {
        Observation::new_unchecked(self.ages(self.target), &self.channels, self.system.csi())
    }

    pub(crate) fn draw(&mut self) {
        self.source.draw(&mut self.channels);
    }

    /// Plays one slot and returns the decision taken.
    #[inline]
    pub fn step(&mut self, policy: &mut dyn Policy) -> ScheduleDecision {
        self.draw();
        let ages = match self.target {
            MetricKind::CaAoi => &self.ca_aoi,
            MetricKind::VanillaAoi => &self.aoi,
        };
        let obs = Observation::new_unchecked(ages, &self.channels, self.system.csi());
        let decision = policy.decide(&obs, &mut self.decisions);
        self.apply(decision);
        decision
    }

    #[inline]
    pub(crate) fn apply(&mut self, decision: ScheduleDecision) {
        for i in 0..self.channels.len() {
            let play = decision.schedules(i);
            self.ca_aoi[i] = ca_aoi_step(self.ca_aoi[i], play, self.channels[i]);
            self.aoi[i] = aoi_step(self.aoi[i], play, self.channels[i]);
        }
        let ages = match self.metric {
            MetricKind::CaAoi => &self.ca_aoi,
            MetricKind::VanillaAoi => &self.aoi,
        };
        self.acc
            .accumulate(ages, decision, &self.channels, self.system.weights());
    }

    pub fn finish(&self) -> Result<RunMetrics> {
        self.acc.finalize()
    }
}

/// One trajectory of `horizon` slots under replication key `key`.
pub fn run_replication(
    system: &System,
    policy: &mut dyn Policy,
    target: MetricKind,
    metric: MetricKind,
    horizon: u64,
    key: u64,
) -> Result<RunMetrics> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    policy.reset();
    let mut traj = Trajectory::new(system, target, metric, key);
    for _ in 0..horizon {
        traj.step(policy);
    }
    traj.finish()
}

pub fn run(config: &SimConfig) -> Result<RunReport> {
    let system = config.system.validate()?;
    run_system(&system, &config.policy, config.metric, config.horizon, config.seed, config.replications)
}

/// [`run`] on an already validated system.
pub fn run_system(
    system: &System,
    policy: &PolicySpec,
    metric: MetricKind,
    horizon: u64,
    seed: u64,
    replications: u32,
) -> Result<RunReport> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    if replications == 0 {
        return Err(Error::ZeroReplications);
    }
    let target = policy.target_for(metric);
    // fail on a bad spec before spawning anything
    policy.build(system, metric)?;
    let keys: Vec<u64> = (0..replications as u64)
        .map(|r| replication_key(seed, r))
        .collect();
    let runs = keys
        .par_iter()
        .map(|&key| {
            let mut p = policy.build(system, metric)?;
            run_replication(system, p.as_mut(), target, metric, horizon, key)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&runs, keys))
}

fn summarize(runs: &[RunMetrics], keys: Vec<u64>) -> RunReport {
    let r = runs.len() as f64;
    let costs: Vec<f64> = runs.iter().map(|m| m.avg_weighted_age).collect();
    let mean = costs.iter().sum::<f64>() / r;
    let std_error = if runs.len() > 1 {
        let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (r - 1.0);
        (var / r).sqrt()
    } else {
        0.0
    };
    let n = runs[0].resource_fractions.len();
    let resource_fractions = (0..n)
        .map(|i| runs.iter().map(|m| m.resource_fractions[i]).sum::<f64>() / r)
        .collect();
    RunReport {
        avg_weighted_age: mean,
        std_error,
        throughput: runs.iter().map(|m| m.throughput).sum::<f64>() / r,
        resource_fractions,
        seeds_used: keys,
        replicate_costs: costs,
    }
}

/// A numeric field of the experiment that a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepPath {
    /// `sensors[i].p`
    SensorProb(usize),
    /// `sensors[i].weight`
    SensorWeight(usize),
    /// `n`: number of randomly drawn sensors.
    SystemSize,
}

impl FromStr for SweepPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadParameterPath(s.to_string());
        if s == "n" {
            return Ok(SweepPath::SystemSize);
        }
        let rest = s.strip_prefix("sensors[").ok_or_else(bad)?;
        let (index, field) = rest.split_once("].").ok_or_else(bad)?;
        let index: usize = index.parse().map_err(|_| bad())?;
        match field {
            "p" => Ok(SweepPath::SensorProb(index)),
            "weight" => Ok(SweepPath::SensorWeight(index)),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for SweepPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepPath::SensorProb(i) => write!(f, "sensors[{i}].p"),
            SweepPath::SensorWeight(i) => write!(f, "sensors[{i}].weight"),
            SweepPath::SystemSize => f.write_str("n"),
        }
    }
}

/// Where an experiment's system comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemSource {
    Fixed(SystemSpec),
    /// `n` sensors of one CSI class with weights uniform on [1, 100] and
    /// ON probabilities uniform on [0, 1], drawn from a dedicated stream.
    Random {
        n: usize,
        csi: Csi,
        normalize_weights: bool,
    },
}

/// Random system of `n` sensors, reproducible from `(seed, n)` alone.
pub fn random_system(n: usize, csi: Csi, normalize_weights: bool, seed: u64) -> SystemSpec {
    let mut rng = substream(labelled_key(seed, n as u64), Purpose::SystemDraw, 0);
    let sensors = (0..n)
        .map(|_| {
            let weight = rng.random_range(1.0..=100.0);
            let p = rng.random_range(0.0..=1.0);
            SensorSpec::new(weight, p, csi)
        })
        .collect();
    SystemSpec::new(sensors, normalize_weights)
}

impl SystemSource {
    pub fn resolve(&self, seed: u64) -> SystemSpec {
        match self {
            SystemSource::Fixed(spec) => spec.clone(),
            SystemSource::Random {
                n,
                csi,
                normalize_weights,
            } => random_system(*n, *csi, *normalize_weights, seed),
        }
    }

    /// The source with `path` set to `value`.
    pub fn with(&self, path: SweepPath, value: f64) -> Result<SystemSource> {
        let bad = || Error::BadParameterPath(path.to_string());
        match (self, path) {
            (SystemSource::Random { csi, normalize_weights, .. }, SweepPath::SystemSize) => {
                if !(value >= 1.0) || value.fract() != 0.0 {
                    return Err(Error::InvalidArgument(format!("system size must be a positive integer, got {value}")));
                }
                Ok(SystemSource::Random {
                    n: value as usize,
                    csi: *csi,
                    normalize_weights: *normalize_weights,
                })
            }
            (SystemSource::Fixed(spec), SweepPath::SensorProb(i) | SweepPath::SensorWeight(i)) => {
                let mut spec = spec.clone();
                let sensor = spec.sensors.get_mut(i).ok_or_else(bad)?;
                match path {
                    SweepPath::SensorProb(_) => sensor.channel_on_prob = value,
                    _ => sensor.weight = value,
                }
                Ok(SystemSource::Fixed(spec))
            }
            _ => Err(bad()),
        }
    }
}

/// One policy scored on one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRun {
    pub policy: PolicySpec,
    pub metric: MetricKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub source: SystemSource,
    pub runs: Vec<PolicyRun>,
    pub horizon: u64,
    pub seed: u64,
    pub replications: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: Option<f64>,
    pub label: String,
    pub metric: MetricKind,
    pub report: RunReport,
    /// Bound on the channel-aware cost; absent for vanilla AoI rows.
    pub lower_bound: Option<f64>,
    pub system: SystemSpec,
}

/// Runs every policy at every sweep value (or once without a sweep). All
/// rows share the channel streams of `(seed, replication, sensor)`.
pub fn sweep(experiment: &Experiment, sweep: Option<(SweepPath, &[f64])>) -> Result<Vec<SweepRow>> {
    if experiment.horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    if experiment.replications == 0 {
        return Err(Error::ZeroReplications);
    }
    let points: Vec<(Option<f64>, SystemSource)> = match sweep {
        None => vec![(None, experiment.source.clone())],
        Some((path, values)) => values
            .iter()
            .map(|&v| Ok((Some(v), experiment.source.with(path, v)?)))
            .collect::<Result<_>>()?,
    };
    let systems: Vec<(Option<f64>, System)> = points
        .into_iter()
        .map(|(v, src)| Ok((v, src.resolve(experiment.seed).validate()?)))
        .collect::<Result<_>>()?;
    let tasks: Vec<(usize, usize)> = (0..systems.len())
        .flat_map(|s| (0..experiment.runs.len()).map(move |r| (s, r)))
        .collect();
    tasks
        .par_iter()
        .map(|&(s, r)| {
            let (value, system) = &systems[s];
            let run = &experiment.runs[r];
            let report = run_system(
                system,
                &run.policy,
                run.metric,
                experiment.horizon,
                experiment.seed,
                experiment.replications,
            )?;
            Ok(SweepRow {
                value: *value,
                label: run.policy.label(run.metric),
                metric: run.metric,
                report,
                lower_bound: match run.metric {
                    MetricKind::CaAoi => Some(lower_bound_partial(system).value),
                    MetricKind::VanillaAoi => None,
                },
                system: system.spec().clone(),
            })
        })
        .collect()
}
