use serde::{Deserialize, Serialize};

use crate::error::{IqaError, Result};

/// Relative efficiency of a multiple-imputation estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyParams {
    /// Fraction of missing information.
    pub gamma: f64,
    pub m: u32,
    pub efficiency: f64,
}

impl EfficiencyParams {
    pub fn new(gamma: f64, m: u32) -> Result<Self> {
        Ok(EfficiencyParams {
            gamma,
            m,
            efficiency: efficiency(gamma, m)?,
        })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(IqaError::invalid(format!("gamma {gamma} outside [0, 1]")));
    }
    Ok(())
}

/// ε = (1 + γ/m)⁻¹.
pub fn efficiency(gamma: f64, m: u32) -> Result<f64> {
    check_gamma(gamma)?;
    if m == 0 {
        return Err(IqaError::invalid("imputation count must be at least 1"));
    }
    Ok(1.0 / (1.0 + gamma / f64::from(m)))
}

/// Smallest integer `m` reaching efficiency `eps`: ⌈γ / (1/ε − 1)⌉, at
/// least 1.
pub fn recommend_imputations(gamma: f64, eps: f64) -> Result<u32> {
    check_gamma(gamma)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(IqaError::invalid(format!("target efficiency {eps} outside (0, 1)")));
    }
    if gamma == 0.0 {
        return Ok(1);
    }
    let raw = gamma / (1.0 / eps - 1.0);
    // Round-trip noise must not push an exact integer over the ceiling.
    let nearest = raw.round();
    let m = if (raw - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    if m > f64::from(u32::MAX) {
        return Err(IqaError::invalid("target efficiency needs too many imputations"));
    }
    Ok((m as u32).max(1))
}
