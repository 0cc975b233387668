//! Universal lower bounds on the time-averaged weighted channel-aware age.

use crate::error::{Error, Result};
use crate::system::{Csi, System};

/// Bound for sensors whose channel is not observed before scheduling:
/// `((Σ √(w p))² − Σ w p) / 2`.
pub fn lower_bound_no_csi(weights: &[f64], probs: &[f64]) -> Result<f64> {
    check_lengths(weights, probs)?;
    let root_sum: f64 = weights
        .iter()
        .zip(probs)
        .map(|(w, p)| (w * p).sqrt())
        .sum();
    let linear: f64 = weights.iter().zip(probs).map(|(w, p)| w * p).sum();
    Ok(((root_sum * root_sum - linear) / 2.0).max(0.0))
}

/// Bound for sensors with channel knowledge: `max(0, ((Σ √w p)² − Σ w p) / 2)`.
/// Here `p` multiplies the root rather than sitting under it.
pub fn lower_bound_csi(weights: &[f64], probs: &[f64]) -> Result<f64> {
    check_lengths(weights, probs)?;
    let root_sum: f64 = weights.iter().zip(probs).map(|(w, p)| w.sqrt() * p).sum();
    let linear: f64 = weights.iter().zip(probs).map(|(w, p)| w * p).sum();
    Ok(((root_sum * root_sum - linear) / 2.0).max(0.0))
}

fn check_lengths(weights: &[f64], probs: &[f64]) -> Result<()> {
    if weights.len() != probs.len() {
        return Err(Error::LengthMismatch {
            left: weights.len(),
            right: probs.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub value: f64,
    /// Contribution of the Unknown-CSI sensors.
    pub no_csi: f64,
    /// Contribution of the Known-CSI sensors.
    pub csi: f64,
}

/// Sum of the per-class bounds over a mixed system, using its effective weights.
pub fn lower_bound_partial(system: &System) -> BoundReport {
    let split = |class: Csi| -> (Vec<f64>, Vec<f64>) {
        system
            .csi()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == class)
            .map(|(i, _)| (system.weights()[i], system.probs()[i]))
            .unzip()
    };
    let (wu, pu) = split(Csi::Unknown);
    let (wk, pk) = split(Csi::Known);
    // lengths agree by construction
    let no_csi = lower_bound_no_csi(&wu, &pu).unwrap_or(0.0);
    let csi = lower_bound_csi(&wk, &pk).unwrap_or(0.0);
    BoundReport {
        value: no_csi + csi,
        no_csi,
        csi,
    }
}
