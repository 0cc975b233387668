//! System description, per-slot state and scheduling decisions.
//!
//! Sensors are identified by their position in [`SystemSpec::sensors`]; every
//! per-sensor vector in the crate is indexed the same way.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether the scheduler sees a sensor's channel realization before deciding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Csi {
    Known,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    On,
    Off,
}

impl Channel {
    #[inline]
    pub fn is_on(self) -> bool {
        matches!(self, Channel::On)
    }

    #[inline]
    pub fn from_on(on: bool) -> Self {
        if on {
            Channel::On
        } else {
            Channel::Off
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub weight: f64,
    pub channel_on_prob: f64,
    pub csi: Csi,
}

impl SensorSpec {
    pub fn new(weight: f64, channel_on_prob: f64, csi: Csi) -> Self {
        Self {
            weight,
            channel_on_prob,
            csi,
        }
    }

    pub fn unknown(weight: f64, channel_on_prob: f64) -> Self {
        Self::new(weight, channel_on_prob, Csi::Unknown)
    }

    pub fn known(weight: f64, channel_on_prob: f64) -> Self {
        Self::new(weight, channel_on_prob, Csi::Known)
    }
}

/// Unchecked system description. Call [`SystemSpec::validate`] before use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub sensors: Vec<SensorSpec>,
    pub normalize_weights: bool,
}

impl SystemSpec {
    pub fn new(sensors: Vec<SensorSpec>, normalize_weights: bool) -> Self {
        Self {
            sensors,
            normalize_weights,
        }
    }

    pub fn validate(&self) -> Result<System> {
        validate(self)
    }
}

/// Checks field ranges and applies weight normalization once.
pub fn validate(spec: &SystemSpec) -> Result<System> {
    if spec.sensors.is_empty() {
        return Err(Error::EmptySystem);
    }
    for (index, s) in spec.sensors.iter().enumerate() {
        if !(s.weight > 0.0) || !s.weight.is_finite() {
            return Err(Error::NonPositiveWeight {
                index,
                weight: s.weight,
            });
        }
        if !(0.0..=1.0).contains(&s.channel_on_prob) {
            return Err(Error::ProbabilityOutOfRange {
                index,
                p: s.channel_on_prob,
            });
        }
    }
    let raw: Vec<f64> = spec.sensors.iter().map(|s| s.weight).collect();
    let weights = if spec.normalize_weights {
        let total: f64 = raw.iter().sum();
        raw.iter().map(|w| w / total).collect()
    } else {
        raw
    };
    Ok(System {
        spec: spec.clone(),
        weights,
        probs: spec.sensors.iter().map(|s| s.channel_on_prob).collect(),
        csi: spec.sensors.iter().map(|s| s.csi).collect(),
    })
}

/// A validated system. Immutable; effective weights are already normalized
/// when the spec asked for it.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    spec: SystemSpec,
    weights: Vec<f64>,
    probs: Vec<f64>,
    csi: Vec<Csi>,
}

impl System {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    /// Effective (post-normalization) weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn csi(&self) -> &[Csi] {
        &self.csi
    }

    pub fn unknown_indices(&self) -> Vec<usize> {
        self.indices_with(Csi::Unknown)
    }

    pub fn known_indices(&self) -> Vec<usize> {
        self.indices_with(Csi::Known)
    }

    fn indices_with(&self, csi: Csi) -> Vec<usize> {
        self.csi
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == csi)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Ages, current channel realizations and the slot counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemState {
    pub ages: Vec<u64>,
    pub channels: Vec<Channel>,
    pub slot: u64,
}

impl SystemState {
    pub fn initial(n: usize) -> Self {
        Self {
            ages: vec![0; n],
            channels: vec![Channel::Off; n],
            slot: 0,
        }
    }
}

/// At most one sensor per slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ScheduleDecision(Option<usize>);

impl ScheduleDecision {
    pub const IDLE: Self = Self(None);

    pub fn sensor(index: usize) -> Self {
        Self(Some(index))
    }

    pub fn scheduled(self) -> Option<usize> {
        self.0
    }

    pub fn is_idle(self) -> bool {
        self.0.is_none()
    }

    #[inline]
    pub fn schedules(self, index: usize) -> bool {
        self.0 == Some(index)
    }
}

/// What a policy may look at: every age, and the channel of Known-CSI sensors
/// only. The realizations of Unknown-CSI sensors are held but never handed out.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    ages: &'a [u64],
    channels: &'a [Channel],
    csi: &'a [Csi],
}

impl<'a> Observation<'a> {
    pub fn new(ages: &'a [u64], channels: &'a [Channel], csi: &'a [Csi]) -> Result<Self> {
        if ages.len() != csi.len() || channels.len() != csi.len() {
            return Err(Error::InvalidArgument(format!(
                "observation needs {} ages and channels, got {} and {}",
                csi.len(),
                ages.len(),
                channels.len()
            )));
        }
        Ok(Self {
            ages,
            channels,
            csi,
        })
    }

    pub(crate) fn new_unchecked(ages: &'a [u64], channels: &'a [Channel], csi: &'a [Csi]) -> Self {
        debug_assert!(ages.len() == csi.len() && channels.len() == csi.len());
        Self {
            ages,
            channels,
            csi,
        }
    }

    pub fn len(&self) -> usize {
        self.ages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ages.is_empty()
    }

    pub fn ages(&self) -> &[u64] {
        self.ages
    }

    #[inline]
    pub fn age(&self, i: usize) -> u64 {
        self.ages[i]
    }

    #[inline]
    pub fn csi(&self, i: usize) -> Csi {
        self.csi[i]
    }

    /// `None` exactly when sensor `i` has unknown CSI.
    #[inline]
    pub fn known_channel(&self, i: usize) -> Option<Channel> {
        match self.csi[i] {
            Csi::Known => Some(self.channels[i]),
            Csi::Unknown => None,
        }
    }

    pub fn known_channels(&self) -> Vec<Option<Channel>> {
        (0..self.len()).map(|i| self.known_channel(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_weights() {
        let spec = SystemSpec::new(
            vec![
                SensorSpec::unknown(1.0, 0.1),
                SensorSpec::unknown(1.0, 0.9),
                SensorSpec::unknown(100.0, 0.5),
            ],
            true,
        );
        let sys = spec.validate().unwrap();
        assert_eq!(sys.weights(), &[1.0 / 102.0, 1.0 / 102.0, 100.0 / 102.0]);
    }

    #[test]
    fn keeps_raw_weights_without_normalization() {
        let spec = SystemSpec::new(vec![SensorSpec::known(5.0, 0.5)], false);
        assert_eq!(spec.validate().unwrap().weights(), &[5.0]);
    }

    #[test]
    fn rejects_bad_fields() {
        let bad_p = SystemSpec::new(vec![SensorSpec::unknown(1.0, 1.2)], false);
        assert_eq!(
            bad_p.validate(),
            Err(Error::ProbabilityOutOfRange { index: 0, p: 1.2 })
        );
        let bad_w = SystemSpec::new(
            vec![SensorSpec::unknown(1.0, 0.5), SensorSpec::unknown(-1.0, 0.5)],
            true,
        );
        assert_eq!(
            bad_w.validate(),
            Err(Error::NonPositiveWeight {
                index: 1,
                weight: -1.0
            })
        );
        assert_eq!(
            SystemSpec::new(vec![], true).validate(),
            Err(Error::EmptySystem)
        );
        let nan_p = SystemSpec::new(vec![SensorSpec::unknown(1.0, f64::NAN)], false);
        assert!(matches!(
            nan_p.validate(),
            Err(Error::ProbabilityOutOfRange { .. })
        ));
    }

    #[test]
    fn observation_hides_unknown_channels() {
        let ages = [1, 2];
        let channels = [Channel::On, Channel::On];
        let csi = [Csi::Unknown, Csi::Known];
        let obs = Observation::new(&ages, &channels, &csi).unwrap();
        assert_eq!(obs.known_channels(), vec![None, Some(Channel::On)]);
        assert!(Observation::new(&ages, &channels[..1], &csi).is_err());
    }
}
