//! Pseudo-rounding of imputed values back onto plausible ones.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::table::ColumnKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingRule {
    None,
    AdaptiveBinary,
    CensorToObserved,
}

impl RoundingRule {
    pub fn for_kind(kind: ColumnKind) -> Self {
        match kind {
            ColumnKind::Continuous => RoundingRule::None,
            ColumnKind::Binary => RoundingRule::AdaptiveBinary,
            ColumnKind::Discrete | ColumnKind::Categorical => RoundingRule::CensorToObserved,
        }
    }
}

/// Cut-off from the normal approximation to the binomial:
/// `ω̄ − Φ⁻¹(ω̄)·√(ω̄(1−ω̄))`.
pub fn adaptive_cutoff(marginal: f64) -> f64 {
    if marginal <= 0.0 || marginal >= 1.0 {
        return marginal.clamp(0.0, 1.0);
    }
    let z = Normal::standard().inverse_cdf(marginal);
    marginal - z * (marginal * (1.0 - marginal)).sqrt()
}

/// Rounds 0/1-scale values to {0, 1} at the adaptive cut-off. A marginal of
/// exactly 0 or 1 yields that constant.
pub fn adaptive_round_binary(values: &[f64], marginal: f64) -> Vec<f64> {
    if marginal <= 0.0 {
        return vec![0.0; values.len()];
    }
    if marginal >= 1.0 {
        return vec![1.0; values.len()];
    }
    let c = adaptive_cutoff(marginal);
    values
        .iter()
        .map(|&v| if v >= c { 1.0 } else { 0.0 })
        .collect()
}

/// Nearest member of a sorted, non-empty set; exact midpoints go to the
/// smaller neighbour.
pub fn censor_value(value: f64, observed: &[f64]) -> f64 {
    debug_assert!(!observed.is_empty());
    let i = observed.partition_point(|&o| o < value);
    if i == 0 {
        return observed[0];
    }
    if i == observed.len() {
        return observed[i - 1];
    }
    let (lo, hi) = (observed[i - 1], observed[i]);
    if hi - value < value - lo {
        hi
    } else {
        lo
    }
}

pub fn censor_to_observed(values: &[f64], observed: &[f64]) -> Vec<f64> {
    values.iter().map(|&v| censor_value(v, observed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_cutoff() {
        assert_eq!(adaptive_cutoff(0.5), 0.5);
        assert_eq!(adaptive_round_binary(&[0.6, 0.4, 0.5], 0.5), vec![1.0, 0.0, 1.0]);
        assert_eq!(adaptive_round_binary(&[0.0, 1.0, 1.0, 0.0], 0.5), vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn cutoff_moves_against_the_marginal() {
        // Rare positives need stronger evidence.
        assert!(adaptive_cutoff(0.2) > 0.5);
        assert!(adaptive_cutoff(0.8) < 0.5);
    }

    #[test]
    fn degenerate_marginals() {
        assert_eq!(adaptive_round_binary(&[0.9, 0.1], 0.0), vec![0.0, 0.0]);
        assert_eq!(adaptive_round_binary(&[0.9, 0.1], 1.0), vec![1.0, 1.0]);
    }

    #[test]
    fn censoring() {
        let set = [1.0, 2.0, 3.0];
        assert_eq!(censor_value(2.4, &set), 2.0);
        assert_eq!(censor_value(3.0, &set), 3.0);
        assert_eq!(censor_value(-7.0, &set), 1.0);
        assert_eq!(censor_value(9.0, &set), 3.0);
        assert_eq!(censor_value(1.5, &[1.0, 2.0]), 1.0);
        assert_eq!(censor_value(1.5000001, &[1.0, 2.0]), 2.0);
    }
}
