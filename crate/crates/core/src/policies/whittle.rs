use crate::analysis::KernelIndexTable;
use crate::error::Result;
use crate::metrics::MetricKind;
use crate::system::{Channel, Csi, Observation, ScheduleDecision, System};

use super::{DecisionRng, Policy};

/// Index of an Unknown-CSI sensor: `w (x+1)(x+2) / (2 (2 − p))`.
#[inline]
pub fn whittle_index_no_csi(x: u64, p: f64, w: f64) -> f64 {
    w * ((x + 1) * (x + 2)) as f64 / (2.0 * (2.0 - p))
}

/// Index of a Known-CSI sensor: `w (x+1)(x+2) / 2` when ON, zero when OFF.
#[inline]
pub fn whittle_index_csi(x: u64, channel: Channel, w: f64) -> f64 {
    match channel {
        Channel::On => w * ((x + 1) * (x + 2)) as f64 / 2.0,
        Channel::Off => 0.0,
    }
}

/// Where a sensor's index comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSource {
    /// Closed-form channel-aware indices.
    ClosedForm,
    /// Indices of the vanilla-AoI single-arm problem, evaluated numerically
    /// from its transition kernel.
    NumericAoi,
}

#[derive(Debug, Clone)]
enum ArmIndex {
    NoCsi { w: f64, p: f64 },
    Csi { w: f64 },
    Table { table: KernelIndexTable, known: bool },
    /// Never worth a slot: the channel is never ON.
    Never,
}

/// Schedules the sensor with the largest index; idles when every index is zero.
#[derive(Debug, Clone)]
pub struct WhittlePolicy {
    arms: Vec<ArmIndex>,
    source: IndexSource,
}

impl WhittlePolicy {
    /// Policy for the given target metric: closed forms for channel-aware
    /// age, kernel-evaluated tables for vanilla AoI.
    pub fn new(system: &System, target: MetricKind) -> Result<Self> {
        match target {
            MetricKind::CaAoi => Ok(Self::closed_form(system)),
            MetricKind::VanillaAoi => Self::numeric_aoi(system),
        }
    }

    pub fn closed_form(system: &System) -> Self {
        let arms = (0..system.len())
            .map(|i| {
                let (w, p) = (system.weights()[i], system.probs()[i]);
                match system.csi()[i] {
                    _ if p == 0.0 => ArmIndex::Never,
                    Csi::Unknown => ArmIndex::NoCsi { w, p },
                    Csi::Known => ArmIndex::Csi { w },
                }
            })
            .collect();
        Self {
            arms,
            source: IndexSource::ClosedForm,
        }
    }

    pub fn numeric_aoi(system: &System) -> Result<Self> {
        let arms = (0..system.len())
            .map(|i| {
                let (w, p) = (system.weights()[i], system.probs()[i]);
                if p == 0.0 {
                    return Ok(ArmIndex::Never);
                }
                let csi = system.csi()[i];
                Ok(ArmIndex::Table {
                    table: KernelIndexTable::new(csi, MetricKind::VanillaAoi, w, p)?,
                    known: csi == Csi::Known,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            arms,
            source: IndexSource::NumericAoi,
        })
    }

    pub fn source(&self) -> IndexSource {
        self.source
    }

    /// Current index of every sensor.
    pub fn indices(&mut self, obs: &Observation<'_>) -> Vec<f64> {
        (0..obs.len()).map(|i| self.index(obs, i)).collect()
    }

    #[inline]
    fn index(&mut self, obs: &Observation<'_>, i: usize) -> f64 {
        let x = obs.age(i);
        match &mut self.arms[i] {
            ArmIndex::NoCsi { w, p } => whittle_index_no_csi(x, *p, *w),
            ArmIndex::Csi { w } => {
                whittle_index_csi(x, obs.known_channel(i).unwrap_or(Channel::Off), *w)
            }
            ArmIndex::Table { table, known } => {
                if *known && obs.known_channel(i) != Some(Channel::On) {
                    0.0
                } else {
                    table.index(x)
                }
            }
            ArmIndex::Never => 0.0,
        }
    }
}

impl Policy for WhittlePolicy {
    fn decide(&mut self, obs: &Observation<'_>, _rng: &mut DecisionRng) -> ScheduleDecision {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..obs.len() {
            let s = self.index(obs, i);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        match best {
            Some((i, s)) if s > 0.0 => ScheduleDecision::sensor(i),
            _ => ScheduleDecision::IDLE,
        }
    }

    fn name(&self) -> &'static str {
        "whittle"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{SensorSpec, SystemSpec};
    use Channel::{Off, On};

    fn decide(policy: &mut WhittlePolicy, sys: &System, ages: &[u64], ch: &[Channel]) -> ScheduleDecision {
        let obs = Observation::new(ages, ch, sys.csi()).unwrap();
        policy.decide(&obs, &mut DecisionRng::new(0, sys.len()))
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(whittle_index_no_csi(0, 0.0, 1.0), 0.5);
        assert_eq!(whittle_index_no_csi(2, 0.5, 2.0), 8.0);
        assert_eq!(whittle_index_no_csi(0, 1.0, 1.0), 1.0);
        assert_eq!(whittle_index_csi(2, On, 1.0), 6.0);
        assert_eq!(whittle_index_csi(5, Off, 10.0), 0.0);
        assert_eq!(whittle_index_csi(0, On, 1.0), 1.0);
    }

    #[test]
    fn no_csi_never_above_csi_on() {
        for x in 0..40 {
            for k in 0..=10 {
                let p = k as f64 / 10.0;
                let a = whittle_index_no_csi(x, p, 1.3);
                let b = whittle_index_csi(x, On, 1.3);
                assert!(a <= b);
                assert_eq!(a == b, k == 10);
            }
        }
    }

    #[test]
    fn schedules_argmax() {
        let sys = SystemSpec::new(
            vec![SensorSpec::unknown(1.0, 0.5), SensorSpec::unknown(1.0, 0.5)],
            false,
        )
        .validate()
        .unwrap();
        let mut pol = WhittlePolicy::closed_form(&sys);
        let obs_ages = [0, 3];
        let ch = [On, On];
        let obs = Observation::new(&obs_ages, &ch, sys.csi()).unwrap();
        let idx = pol.indices(&obs);
        assert!((idx[0] - 2.0 / 3.0).abs() < 1e-15 && (idx[1] - 20.0 / 3.0).abs() < 1e-15);
        assert_eq!(decide(&mut pol, &sys, &[0, 3], &ch), ScheduleDecision::sensor(1));
    }

    #[test]
    fn idles_when_all_known_off() {
        let sys = SystemSpec::new(
            vec![SensorSpec::known(1.0, 0.5), SensorSpec::known(1.0, 0.5)],
            false,
        )
        .validate()
        .unwrap();
        let mut pol = WhittlePolicy::closed_form(&sys);
        assert!(decide(&mut pol, &sys, &[4, 9], &[Off, Off]).is_idle());
    }

    #[test]
    fn mixed_dispatch_prefers_known_on() {
        let sys = SystemSpec::new(
            vec![SensorSpec::unknown(1.0, 0.5), SensorSpec::known(1.0, 0.5)],
            false,
        )
        .validate()
        .unwrap();
        let mut pol = WhittlePolicy::closed_form(&sys);
        // the unknown sensor's true channel must not matter
        for ch0 in [On, Off] {
            assert_eq!(decide(&mut pol, &sys, &[0, 0], &[ch0, On]), ScheduleDecision::sensor(1));
        }
    }

    #[test]
    fn never_on_sensor_gets_no_slots() {
        let sys = SystemSpec::new(
            vec![SensorSpec::unknown(1.0, 0.5), SensorSpec::unknown(100.0, 0.0)],
            false,
        )
        .validate()
        .unwrap();
        let mut pol = WhittlePolicy::closed_form(&sys);
        assert_eq!(decide(&mut pol, &sys, &[0, 0], &[On, Off]), ScheduleDecision::sensor(0));
    }

    #[test]
    fn numeric_aoi_indices_increase() {
        let sys = SystemSpec::new(
            vec![SensorSpec::unknown(1.0, 0.1), SensorSpec::unknown(1.0, 0.9)],
            true,
        )
        .validate()
        .unwrap();
        let mut pol = WhittlePolicy::numeric_aoi(&sys).unwrap();
        let ch = [On, On];
        let mut prev = [f64::NEG_INFINITY; 2];
        for x in 0..300u64 {
            let ages = [x, x];
            let obs = Observation::new(&ages, &ch, sys.csi()).unwrap();
            let idx = pol.indices(&obs);
            for k in 0..2 {
                assert!(idx[k] > prev[k], "index not increasing at {x}");
                prev[k] = idx[k];
            }
        }
    }
}
