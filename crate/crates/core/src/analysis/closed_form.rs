//! Closed-form costs of threshold policies and of the relaxed randomized
//! policies on a single sensor.

use crate::error::{Error, Result};
use crate::system::Csi;

/// `C(X, c) = a(X) + c·num/(X+1)` kept in parts so that equalizing two
/// thresholds can be done without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ThresholdCost {
    linear: f64,
    num: f64,
    den: f64,
}

impl ThresholdCost {
    fn new(csi: Csi, threshold: u64, w: f64, p: f64) -> Self {
        Self {
            linear: w * threshold as f64 / 2.0,
            num: match csi {
                Csi::Unknown => 2.0 - p,
                Csi::Known => 1.0,
            },
            den: (threshold + 1) as f64,
        }
    }

    fn at(self, charge: f64) -> f64 {
        self.linear + charge * self.num / self.den
    }
}

/// Average cost of the threshold-`X` policy at charge `c`:
/// `wX/2 + c(2−p)/(X+1)` without CSI, `wX/2 + c/(X+1)` with CSI.
pub fn threshold_avg_cost(csi: Csi, threshold: u64, charge: f64, w: f64, p: f64) -> f64 {
    ThresholdCost::new(csi, threshold, w, p).at(charge)
}

/// Charge at which thresholds `x` and `x + 1` cost the same.
pub fn numeric_whittle(csi: Csi, x: u64, w: f64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange { index: 0, p });
    }
    let lo = ThresholdCost::new(csi, x, w, p);
    let hi = ThresholdCost::new(csi, x + 1, w, p);
    // a0 + c n/d0 = a1 + c n/d1  =>  c = (a1 − a0) d0 d1 / (n (d1 − d0))
    let denom = lo.num * (hi.den - lo.den);
    if lo.num != hi.num || denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateEquation { age: x });
    }
    Ok((hi.linear - lo.linear) * (lo.den * hi.den) / denom)
}

/// Mean age at slot `t` of one sensor asking with probability `Δ` every slot:
/// `((1−Δ)/Δ)(1 − (1−pΔ)^t)`.
pub fn expected_age_no_csi(p: f64, delta: f64, t: u64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::ZeroDelta(delta));
    }
    check_p(p)?;
    Ok(transient(p, delta, t))
}

/// Mean age at slot `t` of one sensor asking with probability `α` on ON slots:
/// `((1−α)/α)(1 − (p(1−α) + 1 − p)^t)`.
pub fn expected_age_csi(p: f64, alpha: f64, t: u64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::ZeroAlpha(alpha));
    }
    check_p(p)?;
    Ok(transient(p, alpha, t))
}

// both policies reset with probability pq per slot and otherwise grow with
// probability p(1−q), which gives the same law
fn transient(p: f64, q: f64, t: u64) -> f64 {
    let decay = 1.0 - p * q;
    let t = i32::try_from(t).unwrap_or(i32::MAX);
    (1.0 - q) / q * (1.0 - decay.powi(t))
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::NonPositiveProbability { index: 0, p });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::{whittle_index_csi, whittle_index_no_csi};
    use crate::system::Channel;
    use proptest::prelude::*;

    #[test]
    fn cost_examples() {
        assert_eq!(threshold_avg_cost(Csi::Unknown, 2, 3.0, 1.0, 0.5), 2.5);
        assert_eq!(threshold_avg_cost(Csi::Known, 1, 4.0, 2.0, 0.3), 3.0);
        assert_eq!(threshold_avg_cost(Csi::Known, 7, 0.0, 2.0, 0.3), 7.0);
        assert_eq!(threshold_avg_cost(Csi::Unknown, 7, 0.0, 2.0, 0.3), 7.0);
    }

    #[test]
    fn index_examples() {
        assert_eq!(numeric_whittle(Csi::Unknown, 0, 1.0, 0.0).unwrap(), 0.5);
        assert_eq!(numeric_whittle(Csi::Unknown, 2, 2.0, 0.5).unwrap(), 8.0);
        assert_eq!(numeric_whittle(Csi::Known, 2, 1.0, 0.5).unwrap(), 6.0);
    }

    #[test]
    fn equalized_costs_really_tie() {
        for x in 0..30 {
            let c = numeric_whittle(Csi::Unknown, x, 3.0, 0.35).unwrap();
            let a = threshold_avg_cost(Csi::Unknown, x, c, 3.0, 0.35);
            let b = threshold_avg_cost(Csi::Unknown, x + 1, c, 3.0, 0.35);
            assert!((a - b).abs() <= 1e-9 * a.abs());
        }
    }

    #[test]
    fn transient_examples() {
        assert_eq!(expected_age_no_csi(0.3, 0.4, 0).unwrap(), 0.0);
        assert_eq!(expected_age_no_csi(0.3, 1.0, 17).unwrap(), 0.0);
        assert_eq!(expected_age_no_csi(0.5, 0.5, 2).unwrap(), 0.4375);
        assert_eq!(expected_age_csi(0.3, 1.0, 9).unwrap(), 0.0);
        assert_eq!(expected_age_csi(1.0, 0.5, 1).unwrap(), 0.5);
        assert_eq!(expected_age_csi(0.6, 0.2, 0).unwrap(), 0.0);
        assert_eq!(expected_age_no_csi(0.5, 0.0, 3), Err(Error::ZeroDelta(0.0)));
        assert_eq!(expected_age_csi(0.5, 1.5, 3), Err(Error::ZeroAlpha(1.5)));
    }

    #[test]
    fn transient_matches_recursion() {
        // E[X(t+1)] = (1 − pq) E[X(t)] + p(1 − q), from the one-step law
        for &(p, q) in &[(0.3, 0.3), (0.7, 0.3), (0.9, 0.05)] {
            let mut m = 0.0;
            for t in 0..60 {
                let f = expected_age_no_csi(p, q, t).unwrap();
                assert!((f - m).abs() < 1e-12, "p={p} q={q} t={t}");
                m = (1.0 - p * q) * m + p * (1.0 - q);
            }
        }
    }

    #[test]
    fn transient_limit_is_stationary_cost() {
        let f = expected_age_no_csi(0.4, 0.25, 100_000).unwrap();
        assert!((f - 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn numeric_index_equals_closed_form(x in 0u64..200, w in 0.01f64..100.0, p in 0.0f64..=1.0) {
            let u = numeric_whittle(Csi::Unknown, x, w, p).unwrap();
            let k = numeric_whittle(Csi::Known, x, w, p).unwrap();
            let cu = whittle_index_no_csi(x, p, w);
            let ck = whittle_index_csi(x, Channel::On, w);
            prop_assert!((u - cu).abs() <= 1e-12 * cu.max(1.0));
            prop_assert!((k - ck).abs() <= 1e-12 * ck.max(1.0));
        }

        #[test]
        fn threshold_cost_convex(x in 1u64..500, c in 0.0f64..1e4, w in 0.01f64..100.0, p in 0.0f64..=1.0) {
            for csi in [Csi::Unknown, Csi::Known] {
                let f = |k| threshold_avg_cost(csi, k, c, w, p);
                let second = f(x + 1) - 2.0 * f(x) + f(x - 1);
                prop_assert!(second >= -1e-9 * (1.0 + f(x).abs()));
            }
        }
    }
}
