//! Stationary randomized policies and the parameter solvers that tune them.
//!
//! Unknown-CSI sensor `i` asks for the slot with probability `Δᵢ`; Known-CSI
//! sensor `i` asks with probability `αᵢ` whenever its channel is ON. The
//! parameters minimize `Σ w(1−Δ)/Δ + Σ w(1−α)/α` subject to the expected
//! budget `ΣΔ + Σ pα = 1`. Known-CSI parameters that would exceed one are
//! pinned at one and their share `p` leaves the budget (active-set loop).

use rand::distr::{Bernoulli, Distribution};

use crate::error::{Error, Result};
use crate::system::{Channel, Csi, Observation, ScheduleDecision, System};

use super::{argmax_lowest, DecisionRng, Policy};

/// Solved parameters. `deltas` follow the order of the Unknown-CSI sensors,
/// `alphas` the order of the Known-CSI sensors.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizedParams {
    pub deltas: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Lagrange multiplier of the budget constraint at the final active set.
    pub lambda_star: f64,
}

impl RandomizedParams {
    /// `Σ Δ + Σ p α` for the given Known-CSI probabilities.
    pub fn budget_used(&self, probs_plus: &[f64]) -> f64 {
        self.deltas.iter().sum::<f64>()
            + self
                .alphas
                .iter()
                .zip(probs_plus)
                .map(|(a, p)| a * p)
                .sum::<f64>()
    }

    pub fn closed_form_cost(&self, weights_minus: &[f64], weights_plus: &[f64]) -> Result<f64> {
        closed_form_cost(self, weights_minus, weights_plus)
    }
}

/// Unknown-CSI only: `√λ = Σ √w`, `Δᵢ = √wᵢ / √λ`.
pub fn solve_randomized_no_csi(weights: &[f64]) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::EmptySet);
    }
    check_weights(weights)?;
    let roots: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let total: f64 = roots.iter().sum();
    Ok(roots.iter().map(|r| r * 1.0 / total).collect())
}

/// Known-CSI only, with active-set clamping of `α ≥ 1`.
pub fn solve_randomized_csi(weights: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::EmptySet);
    }
    let (alphas, _) = active_set(&[], weights, probs)?;
    Ok(alphas)
}

/// Mixed system: joint budget over both classes.
pub fn solve_randomized_partial(
    weights_minus: &[f64],
    weights_plus: &[f64],
    probs_plus: &[f64],
) -> Result<RandomizedParams> {
    if weights_minus.is_empty() && weights_plus.is_empty() {
        return Err(Error::EmptySet);
    }
    check_weights(weights_minus)?;
    let (alphas, solution) = active_set(weights_minus, weights_plus, probs_plus)?;
    let roots_minus: Vec<f64> = weights_minus.iter().map(|w| w.sqrt()).collect();
    let deltas = roots_minus
        .iter()
        .map(|r| r * solution.budget / solution.root_sum)
        .collect();
    let sqrt_lambda = solution.root_sum / solution.budget;
    Ok(RandomizedParams {
        deltas,
        alphas,
        lambda_star: sqrt_lambda * sqrt_lambda,
    })
}

struct ActiveSolution {
    /// Σ√w over Unknown-CSI sensors plus Σ√(wp) over the unclamped Known ones.
    root_sum: f64,
    /// Budget left after removing the clamped sensors' `p`.
    budget: f64,
}

fn check_weights(weights: &[f64]) -> Result<()> {
    for (index, &weight) in weights.iter().enumerate() {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::NonPositiveWeight { index, weight });
        }
    }
    Ok(())
}

fn active_set(
    weights_minus: &[f64],
    weights_plus: &[f64],
    probs_plus: &[f64],
) -> Result<(Vec<f64>, ActiveSolution)> {
    if weights_plus.len() != probs_plus.len() {
        return Err(Error::LengthMismatch {
            left: weights_plus.len(),
            right: probs_plus.len(),
        });
    }
    check_weights(weights_plus)?;
    for (index, &p) in probs_plus.iter().enumerate() {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::NonPositiveProbability { index, p });
        }
    }

    let minus_sum: f64 = weights_minus.iter().map(|w| w.sqrt()).sum();
    let mut budget = 1.0;
    let mut active: Vec<usize> = (0..weights_plus.len()).collect();
    let mut alphas = vec![1.0; weights_plus.len()];
    let root_sum = |active: &[usize]| -> f64 {
        minus_sum
            + active
                .iter()
                .map(|&i| (weights_plus[i] * probs_plus[i]).sqrt())
                .sum::<f64>()
    };

    // each pass either clamps at least one sensor or stops
    while !active.is_empty() {
        let sum = root_sum(&active);
        let mut violation = false;
        active.retain(|&i| {
            // α = √(w/(pλ)) with √λ = sum / budget
            let alpha = (weights_plus[i] / probs_plus[i]).sqrt() * budget / sum;
            if alpha >= 1.0 {
                alphas[i] = 1.0;
                violation = true;
                false
            } else {
                alphas[i] = alpha;
                true
            }
        });
        if !violation {
            break;
        }
        budget = 1.0
            - (0..weights_plus.len())
                .filter(|i| !active.contains(i))
                .map(|i| probs_plus[i])
                .sum::<f64>();
    }
    // when the loop emptied the active set the multiplier must be refreshed
    // for the Unknown-CSI sensors that still share the leftover budget
    let sum = root_sum(&active);
    Ok((
        alphas,
        ActiveSolution {
            root_sum: sum,
            budget,
        },
    ))
}

/// `Σ w(1−Δ)/Δ + Σ w(1−α)/α`.
pub fn closed_form_cost(
    params: &RandomizedParams,
    weights_minus: &[f64],
    weights_plus: &[f64],
) -> Result<f64> {
    if params.deltas.len() != weights_minus.len() || params.alphas.len() != weights_plus.len() {
        return Err(Error::ParamMismatch(format!(
            "{} Δ / {} α for {} and {} weights",
            params.deltas.len(),
            params.alphas.len(),
            weights_minus.len(),
            weights_plus.len()
        )));
    }
    let mut total = 0.0;
    for (&d, &w) in params
        .deltas
        .iter()
        .zip(weights_minus)
        .chain(params.alphas.iter().zip(weights_plus))
    {
        if !(d > 0.0 && d <= 1.0) {
            return Err(Error::ZeroParam(d));
        }
        total += w * (1.0 - d) / d;
    }
    Ok(total)
}

#[derive(Debug, Clone)]
enum Selection {
    /// Asks every slot with this probability.
    Blind(Bernoulli),
    /// Asks with this probability when the channel is seen ON.
    WhenOn(Bernoulli),
    Never,
}

/// Independent per-sensor requests; conflicts go to the largest weighted age.
#[derive(Debug, Clone)]
pub struct RandomizedPolicy {
    selection: Vec<Selection>,
    weights: Vec<f64>,
    asked: Vec<bool>,
}

impl RandomizedPolicy {
    /// Uses the given parameters as-is.
    pub fn new(params: &RandomizedParams, system: &System) -> Result<Self> {
        let unknown = system.unknown_indices();
        let known = system.known_indices();
        if params.deltas.len() != unknown.len() || params.alphas.len() != known.len() {
            return Err(Error::ParamMismatch(format!(
                "system has {} Unknown-CSI and {} Known-CSI sensors, parameters cover {} and {}",
                unknown.len(),
                known.len(),
                params.deltas.len(),
                params.alphas.len()
            )));
        }
        let mut selection = vec![Selection::Never; system.len()];
        for (&i, &d) in unknown.iter().zip(&params.deltas) {
            selection[i] = Selection::Blind(bernoulli(d)?);
        }
        for (&i, &a) in known.iter().zip(&params.alphas) {
            selection[i] = Selection::WhenOn(bernoulli(a)?);
        }
        Ok(Self {
            selection,
            weights: system.weights().to_vec(),
            asked: Vec::new(),
        })
    }

    /// Solves for the optimal parameters. Sensors whose channel is never ON
    /// are left out of the budget and never ask for the slot.
    pub fn optimal(system: &System) -> Result<(Self, RandomizedParams)> {
        let eligible = |class: Csi| -> Vec<usize> {
            (0..system.len())
                .filter(|&i| system.csi()[i] == class && system.probs()[i] > 0.0)
                .collect()
        };
        let unknown = eligible(Csi::Unknown);
        let known = eligible(Csi::Known);
        let mut selection = vec![Selection::Never; system.len()];
        let params = if unknown.is_empty() && known.is_empty() {
            RandomizedParams {
                deltas: vec![],
                alphas: vec![],
                lambda_star: 0.0,
            }
        } else {
            let w = |idx: &[usize]| idx.iter().map(|&i| system.weights()[i]).collect::<Vec<_>>();
            let p_plus: Vec<f64> = known.iter().map(|&i| system.probs()[i]).collect();
            solve_randomized_partial(&w(&unknown), &w(&known), &p_plus)?
        };
        for (&i, &d) in unknown.iter().zip(&params.deltas) {
            selection[i] = Selection::Blind(bernoulli(d)?);
        }
        for (&i, &a) in known.iter().zip(&params.alphas) {
            selection[i] = Selection::WhenOn(bernoulli(a)?);
        }
        Ok((
            Self {
                selection,
                weights: system.weights().to_vec(),
                asked: Vec::new(),
            },
            params,
        ))
    }

    /// Sensors that asked for the slot this time, given one draw per sensor.
    fn choose(&self, obs: &Observation<'_>, asked: impl Fn(usize) -> bool) -> ScheduleDecision {
        let candidates = (0..obs.len())
            .filter(|&i| asked(i))
            .map(|i| (i, self.weights[i] * obs.age(i) as f64));
        match argmax_lowest(candidates) {
            Some((i, _)) => ScheduleDecision::sensor(i),
            None => ScheduleDecision::IDLE,
        }
    }
}

fn bernoulli(p: f64) -> Result<Bernoulli> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::ZeroParam(p));
    }
    Bernoulli::new(p).map_err(|_| Error::ZeroParam(p))
}

impl Policy for RandomizedPolicy {
    fn decide(&mut self, obs: &Observation<'_>, rng: &mut DecisionRng) -> ScheduleDecision {
        // one draw per sensor per slot keeps every stream aligned
        let mut flags = std::mem::take(&mut self.asked);
        flags.resize(obs.len(), false);
        for (i, flag) in flags.iter_mut().enumerate() {
            *flag = match &self.selection[i] {
                Selection::Blind(b) => b.sample(rng.sensor(i)),
                Selection::WhenOn(b) => {
                    let draw = b.sample(rng.sensor(i));
                    draw && obs.known_channel(i) == Some(Channel::On)
                }
                Selection::Never => false,
            };
        }
        let decision = self.choose(obs, |i| flags[i]);
        self.asked = flags;
        decision
    }

    fn name(&self) -> &'static str {
        "randomized"
    }
}
