use crate::system::{Channel, Observation, ScheduleDecision, System};

use super::{argmax_lowest, DecisionRng, Policy};

/// Largest weighted age, discounted by `p` for sensors whose channel is hidden.
#[derive(Debug, Clone)]
pub struct GreedyPolicy {
    weights: Vec<f64>,
    probs: Vec<f64>,
    restrict_to_on: bool,
    has_unknown: bool,
}

impl GreedyPolicy {
    /// With `restrict_to_on`, a Known-CSI sensor whose channel is OFF scores
    /// zero; otherwise it scores its weighted age regardless of the channel.
    pub fn new(system: &System, restrict_to_on: bool) -> Self {
        Self {
            weights: system.weights().to_vec(),
            probs: system.probs().to_vec(),
            restrict_to_on,
            has_unknown: !system.unknown_indices().is_empty(),
        }
    }

    pub fn restricts_to_on(&self) -> bool {
        self.restrict_to_on
    }

    #[inline]
    fn score(&self, obs: &Observation<'_>, i: usize) -> f64 {
        let wx = self.weights[i] * obs.age(i) as f64;
        match obs.known_channel(i) {
            None => wx * self.probs[i],
            Some(Channel::Off) if self.restrict_to_on => 0.0,
            Some(_) => wx,
        }
    }
}

impl Policy for GreedyPolicy {
    fn decide(&mut self, obs: &Observation<'_>, _rng: &mut DecisionRng) -> ScheduleDecision {
        match argmax_lowest((0..obs.len()).map(|i| (i, self.score(obs, i)))) {
            Some((_, s)) if s <= 0.0 && !self.has_unknown => ScheduleDecision::IDLE,
            Some((i, _)) => ScheduleDecision::sensor(i),
            None => ScheduleDecision::IDLE,
        }
    }

    fn name(&self) -> &'static str {
        if self.restrict_to_on {
            "greedy"
        } else {
            "greedy_any"
        }
    }
}

/// Always the sensor with the best channel.
#[derive(Debug, Clone)]
pub struct MaxThroughputPolicy {
    choice: usize,
}

impl MaxThroughputPolicy {
    pub fn new(system: &System) -> Self {
        let choice = argmax_lowest(system.probs().iter().copied().enumerate())
            .map(|(i, _)| i)
            .unwrap_or(0);
        Self { choice }
    }

    pub fn choice(&self) -> usize {
        self.choice
    }
}

impl Policy for MaxThroughputPolicy {
    fn decide(&mut self, _obs: &Observation<'_>, _rng: &mut DecisionRng) -> ScheduleDecision {
        ScheduleDecision::sensor(self.choice)
    }

    fn name(&self) -> &'static str {
        "max_throughput"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{SensorSpec, SystemSpec};
    use Channel::{Off, On};

    fn run(pol: &mut impl Policy, sys: &System, ages: &[u64], ch: &[Channel]) -> ScheduleDecision {
        let obs = Observation::new(ages, ch, sys.csi()).unwrap();
        pol.decide(&obs, &mut DecisionRng::new(0, sys.len()))
    }

    fn system(sensors: Vec<SensorSpec>) -> System {
        SystemSpec::new(sensors, false).validate().unwrap()
    }

    #[test]
    fn no_csi_scores_include_p() {
        let sys = system(vec![SensorSpec::unknown(1.0, 0.1), SensorSpec::unknown(1.0, 0.9)]);
        let mut g = GreedyPolicy::new(&sys, true);
        assert_eq!(run(&mut g, &sys, &[10, 1], &[Off, Off]), ScheduleDecision::sensor(0));
    }

    #[test]
    fn csi_scores() {
        let sys = system(vec![SensorSpec::known(1.0, 0.5), SensorSpec::known(1.0, 0.5)]);
        let mut g = GreedyPolicy::new(&sys, true);
        assert_eq!(run(&mut g, &sys, &[5, 8], &[On, On]), ScheduleDecision::sensor(1));
        assert_eq!(run(&mut g, &sys, &[5, 8], &[On, Off]), ScheduleDecision::sensor(0));
        assert!(run(&mut g, &sys, &[5, 8], &[Off, Off]).is_idle());

        let mut any = GreedyPolicy::new(&sys, false);
        assert_eq!(run(&mut any, &sys, &[5, 8], &[On, Off]), ScheduleDecision::sensor(1));
    }

    #[test]
    fn unknown_sensor_present_never_idles() {
        let sys = system(vec![SensorSpec::unknown(1.0, 0.5), SensorSpec::known(1.0, 0.5)]);
        let mut g = GreedyPolicy::new(&sys, true);
        assert_eq!(run(&mut g, &sys, &[0, 0], &[On, Off]), ScheduleDecision::sensor(0));
    }

    #[test]
    fn max_throughput_picks_best_channel() {
        let a = system(vec![SensorSpec::unknown(1.0, 0.1), SensorSpec::unknown(1.0, 0.7)]);
        let mut m = MaxThroughputPolicy::new(&a);
        for ages in [[0, 0], [50, 0], [0, 50]] {
            assert_eq!(run(&mut m, &a, &ages, &[On, On]), ScheduleDecision::sensor(1));
        }
        let b = system(vec![SensorSpec::unknown(1.0, 0.5), SensorSpec::unknown(1.0, 0.5)]);
        assert_eq!(MaxThroughputPolicy::new(&b).choice(), 0);
        let c = system(vec![SensorSpec::known(3.0, 0.2)]);
        assert_eq!(MaxThroughputPolicy::new(&c).choice(), 0);
    }
}
