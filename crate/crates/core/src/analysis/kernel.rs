//! Threshold policies evaluated directly on the single-sensor transition
//! kernel by renewal at the age resets, and indices derived from them.
//! Used for the vanilla-AoI arm, which has no closed form here.

use crate::error::{Error, Result};
use crate::metrics::MetricKind;
use crate::system::{Channel, Csi};

/// Long-run rates of the policy that plays at every age `≥ threshold`
/// (and, with CSI, only on ON slots).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRates {
    /// Average `w·age` per slot, charge excluded.
    pub avg_age_cost: f64,
    /// Plays per slot.
    pub play_rate: f64,
    /// Mean slots between successful deliveries.
    pub cycle_length: f64,
}

impl ThresholdRates {
    pub fn cost(&self, charge: f64) -> f64 {
        self.avg_age_cost + charge * self.play_rate
    }
}

/// Survival `(1−p)^k` below `e^-40` past the threshold.
fn truncation(threshold: u64, p: f64, metric: MetricKind) -> u64 {
    match metric {
        // at or above the threshold the age never grows again
        MetricKind::CaAoi => threshold,
        MetricKind::VanillaAoi => threshold + (40.0 / p).ceil() as u64 + 8,
    }
}

pub fn threshold_rates(csi: Csi, metric: MetricKind, w: f64, p: f64, threshold: u64) -> Result<ThresholdRates> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::NonPositiveWeight { index: 0, weight: w });
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::NonPositiveProbability { index: 0, p });
    }
    let cap = truncation(threshold, p, metric);

    // slots, cost and plays accumulated from age x until the next delivery;
    // each age either delivers, stays put, or moves up by one
    let (mut slots, mut cost, mut plays) = (0.0, 0.0, 0.0);
    for x in (0..=cap).rev() {
        let mut stay = 0.0;
        let mut up = 0.0;
        let mut stage_cost = 0.0;
        let mut stage_plays = 0.0;
        for (prob, ch) in [(p, Channel::On), (1.0 - p, Channel::Off)] {
            if prob == 0.0 {
                continue;
            }
            let play = x >= threshold && (csi == Csi::Unknown || ch.is_on());
            let y = metric.step(x, play, ch).min(cap);
            stage_cost += prob * w * y as f64;
            if play {
                stage_plays += prob;
            }
            if play && ch.is_on() {
                continue;
            }
            if y == x {
                stay += prob;
            } else {
                up += prob;
            }
        }
        let leave = 1.0 - stay;
        if !(leave > 0.0) {
            return Err(Error::InvalidArgument(format!("age {x} never resets under threshold {threshold}")));
        }
        slots = (1.0 + up * slots) / leave;
        cost = (stage_cost + up * cost) / leave;
        plays = (stage_plays + up * plays) / leave;
    }
    Ok(ThresholdRates {
        avg_age_cost: cost / slots,
        play_rate: plays / slots,
        cycle_length: slots,
    })
}

/// Charge at which playing from age `x` and playing from age `x + 1` cost the same.
pub fn kernel_whittle(csi: Csi, metric: MetricKind, w: f64, p: f64, x: u64) -> Result<f64> {
    let lo = threshold_rates(csi, metric, w, p, x)?;
    let hi = threshold_rates(csi, metric, w, p, x + 1)?;
    index_from(&lo, &hi, x)
}

fn index_from(lo: &ThresholdRates, hi: &ThresholdRates, x: u64) -> Result<f64> {
    let dr = lo.play_rate - hi.play_rate;
    if !(dr > 0.0) {
        return Err(Error::DegenerateEquation { age: x });
    }
    Ok((hi.avg_age_cost - lo.avg_age_cost) / dr)
}

/// Indices of one arm, extended on demand as larger ages are queried.
#[derive(Debug, Clone)]
pub struct KernelIndexTable {
    csi: Csi,
    metric: MetricKind,
    w: f64,
    p: f64,
    rates: Vec<ThresholdRates>,
    indices: Vec<f64>,
}

impl KernelIndexTable {
    pub fn new(csi: Csi, metric: MetricKind, w: f64, p: f64) -> Result<Self> {
        let first = threshold_rates(csi, metric, w, p, 0)?;
        let mut table = Self {
            csi,
            metric,
            w,
            p,
            rates: vec![first],
            indices: Vec::new(),
        };
        table.extend_to(64)?;
        Ok(table)
    }

    fn extend_to(&mut self, x: u64) -> Result<()> {
        while self.indices.len() as u64 <= x {
            let k = self.indices.len() as u64;
            let hi = threshold_rates(self.csi, self.metric, self.w, self.p, k + 1)?;
            let idx = index_from(&self.rates[k as usize], &hi, k)?;
            self.rates.push(hi);
            self.indices.push(idx);
        }
        Ok(())
    }

    /// Index at age `x`. Ages beyond the point where the equation degenerates
    /// (play rates equal to machine precision) keep the last finite value.
    pub fn index(&mut self, x: u64) -> f64 {
        if self.extend_to(x).is_err() {
            return self.indices.last().copied().unwrap_or(0.0);
        }
        self.indices[x as usize]
    }

    pub fn computed(&self) -> &[f64] {
        &self.indices
    }
}
