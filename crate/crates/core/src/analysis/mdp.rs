//! Single-sensor problem with a per-play charge, solved by discounted value
//! iteration on a truncated age space.
//!
//! State is the age `x` (Unknown CSI) or the pair `(x, λ)` (Known CSI, the
//! slot's channel is seen before acting). Stage cost is `w·y + c·a` where `y`
//! is the age after the slot. Ages saturate at `max_age`.

use crate::error::{Error, Result};
use crate::metrics::MetricKind;
use crate::system::{Channel, Csi};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleArmMdp {
    pub csi: Csi,
    pub p: f64,
    pub w: f64,
    pub charge: f64,
    pub max_age: u64,
    pub metric: MetricKind,
}

impl SingleArmMdp {
    pub fn new(csi: Csi, p: f64, w: f64, charge: f64, max_age: u64, metric: MetricKind) -> Result<Self> {
        let mdp = Self {
            csi,
            p,
            w,
            charge,
            max_age,
            metric,
        };
        mdp.validate()?;
        Ok(mdp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w > 0.0) || !self.w.is_finite() {
            return Err(Error::NonPositiveWeight { index: 0, weight: self.w });
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::ProbabilityOutOfRange { index: 0, p: self.p });
        }
        if !self.charge.is_finite() {
            return Err(Error::InvalidArgument(format!("charge must be finite, got {}", self.charge)));
        }
        if self.max_age < 2 {
            return Err(Error::InvalidArgument(format!(
                "max_age must be at least 2, got {}",
                self.max_age
            )));
        }
        Ok(())
    }

    pub fn with_charge(mut self, charge: f64) -> Self {
        self.charge = charge;
        self
    }

    /// Number of states: `max_age + 1`, doubled when the channel is observed.
    pub fn num_states(&self) -> usize {
        let ages = self.max_age as usize + 1;
        match self.csi {
            Csi::Unknown => ages,
            Csi::Known => 2 * ages,
        }
    }

    /// Row-major state index; `channel` is ignored for Unknown CSI.
    pub fn state(&self, x: u64, channel: Channel) -> usize {
        match self.csi {
            Csi::Unknown => x as usize,
            Csi::Known => 2 * x as usize + channel.is_on() as usize,
        }
    }

    #[inline]
    fn post_age(&self, x: u64, play: bool, channel: Channel) -> u64 {
        self.metric.step(x, play, channel).min(self.max_age)
    }

    /// Expected stage cost and the successor distribution of one action.
    /// The successor list holds `(probability, post-slot age)`.
    pub(crate) fn outcomes(&self, x: u64, channel: Channel, play: bool) -> ([(f64, u64); 2], f64) {
        let c = if play { self.charge } else { 0.0 };
        match self.csi {
            Csi::Unknown => {
                let on = self.post_age(x, play, Channel::On);
                let off = self.post_age(x, play, Channel::Off);
                let cost = self.w * (self.p * on as f64 + (1.0 - self.p) * off as f64) + c;
                ([(self.p, on), (1.0 - self.p, off)], cost)
            }
            Csi::Known => {
                let y = self.post_age(x, play, channel);
                ([(1.0, y), (0.0, y)], self.w * y as f64 + c)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction {
    pub values: Vec<f64>,
    /// `true` where playing is optimal (ties resolved toward playing).
    pub actions: Vec<bool>,
    pub discount: f64,
    pub iterations: usize,
    pub residual: f64,
    csi: Csi,
    max_age: u64,
}

pub const DEFAULT_DISCOUNT: f64 = 0.999;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 200_000;

/// Jacobi value iteration from `V₀ = 0` until the sup-norm change is at most `tol`.
pub fn value_iterate(mdp: &SingleArmMdp, discount: f64, tol: f64) -> Result<ValueFunction> {
    mdp.validate()?;
    if !(discount > 0.0 && discount < 1.0) {
        return Err(Error::InvalidArgument(format!("discount must lie in (0, 1), got {discount}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }

    // successor tables depend only on (state, action); build them once
    let n = mdp.num_states();
    let mut table = Vec::with_capacity(2 * n);
    for x in 0..=mdp.max_age {
        let channels: &[Channel] = match mdp.csi {
            Csi::Unknown => &[Channel::On],
            Csi::Known => &[Channel::Off, Channel::On],
        };
        for &ch in channels {
            for play in [false, true] {
                table.push(mdp.outcomes(x, ch, play));
            }
        }
    }

    let p = mdp.p;
    let mut v = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut actions = vec![false; n];
    // expected value of entering age y, averaged over the next channel for Known CSI
    let mut ev = vec![0.0; mdp.max_age as usize + 1];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        match mdp.csi {
            Csi::Unknown => ev.copy_from_slice(&v),
            Csi::Known => {
                for (y, e) in ev.iter_mut().enumerate() {
                    *e = p * v[2 * y + 1] + (1.0 - p) * v[2 * y];
                }
            }
        }
        residual = 0.0;
        for s in 0..n {
            let q = |play: usize| {
                let (succ, cost) = &table[2 * s + play];
                cost + discount * (succ[0].0 * ev[succ[0].1 as usize] + succ[1].0 * ev[succ[1].1 as usize])
            };
            let (q0, q1) = (q(0), q(1));
            let best = q0.min(q1);
            actions[s] = q1 <= q0;
            residual = f64::max(residual, (best - v[s]).abs());
            next[s] = best;
        }
        std::mem::swap(&mut v, &mut next);
        if residual <= tol {
            return Ok(ValueFunction {
                values: v,
                actions,
                discount,
                iterations,
                residual,
                csi: mdp.csi,
                max_age: mdp.max_age,
            });
        }
    }
    Err(Error::NonConvergence { iterations, residual })
}

impl ValueFunction {
    fn index(&self, x: u64, channel: Channel) -> usize {
        match self.csi {
            Csi::Unknown => x as usize,
            Csi::Known => 2 * x as usize + channel.is_on() as usize,
        }
    }

    pub fn value(&self, x: u64, channel: Channel) -> f64 {
        self.values[self.index(x, channel)]
    }

    pub fn plays(&self, x: u64, channel: Channel) -> bool {
        self.actions[self.index(x, channel)]
    }

    pub fn max_age(&self) -> u64 {
        self.max_age
    }

    /// Channel rows that carry a decision: the single row for Unknown CSI,
    /// both rows for Known CSI.
    fn rows(&self) -> &'static [Channel] {
        match self.csi {
            Csi::Unknown => &[Channel::On],
            Csi::Known => &[Channel::Off, Channel::On],
        }
    }

    /// First age where playing is optimal on the given row, provided the row
    /// idles below it and plays from it on. `None` when the row never plays.
    pub fn threshold(&self, channel: Channel) -> Result<Option<u64>> {
        let mut first = None;
        for x in 0..=self.max_age {
            let play = self.plays(x, channel);
            match (first, play) {
                (None, true) => first = Some(x),
                (Some(_), false) => {
                    return Err(Error::NotThreshold {
                        state: self.index(x, channel),
                    })
                }
                _ => {}
            }
        }
        Ok(first)
    }

    /// Every decision row is a threshold rule.
    pub fn check_threshold(&self) -> Result<()> {
        for &ch in self.rows() {
            self.threshold(ch)?;
        }
        Ok(())
    }

    /// Values are non-decreasing in age on every row; returns the first
    /// offending state otherwise.
    pub fn first_decrease(&self) -> Option<usize> {
        for &ch in self.rows() {
            for x in 0..self.max_age {
                if self.value(x + 1, ch) < self.value(x, ch) {
                    return Some(self.index(x + 1, ch));
                }
            }
        }
        None
    }

    /// States where idling is optimal.
    pub fn idle_set(&self) -> Vec<usize> {
        (0..self.actions.len()).filter(|&s| !self.actions[s]).collect()
    }
}

/// One entry of an indexability scan.
#[derive(Debug, Clone, PartialEq)]
pub struct IdleSet {
    pub charge: f64,
    pub idle: Vec<bool>,
}

impl IdleSet {
    pub fn len(&self) -> usize {
        self.idle.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Solves the template at every charge (ascending) and checks that the idle
/// sets are nested.
pub fn indexability_scan(
    template: &SingleArmMdp,
    charges: &[f64],
    discount: f64,
    tol: f64,
) -> Result<Vec<IdleSet>> {
    if charges.windows(2).any(|c| !(c[0] < c[1])) {
        return Err(Error::InvalidArgument("charges must be strictly ascending".into()));
    }
    let mut trace: Vec<IdleSet> = Vec::with_capacity(charges.len());
    for &c in charges {
        let vf = value_iterate(&template.with_charge(c), discount, tol)?;
        let idle: Vec<bool> = vf.actions.iter().map(|&a| !a).collect();
        if let Some(prev) = trace.last() {
            if let Some(state) = (0..idle.len()).find(|&s| prev.idle[s] && !idle[s]) {
                return Err(Error::MonotonicityViolation {
                    smaller: prev.charge,
                    larger: c,
                    state,
                });
            }
        }
        trace.push(IdleSet { charge: c, idle });
    }
    Ok(trace)
}
