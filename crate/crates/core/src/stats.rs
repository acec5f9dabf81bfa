//! Distribution-compatibility tests used to veto biased imputers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{IqaError, Result};
use crate::table::ColumnKind;

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Expected cell count below which categories are pooled.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

/// Below this sample size the asymptotic KS p-value is flagged.
pub const KS_SMALL_SAMPLE: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Ks,
    ChiSquare,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub rejected: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl TestResult {
    fn new(test: TestKind, statistic: f64, p_value: f64, alpha: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestResult {
            test,
            statistic,
            p_value,
            alpha,
            rejected: p_value < alpha,
            flags: Vec::new(),
        }
    }

    /// Re-evaluates the rejection flag at a different level.
    pub fn at_level(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self.rejected = self.p_value < alpha;
        self
    }
}

/// Largest absolute gap between the empirical CDFs of `a` and `b`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(IqaError::degenerate("KS test needs two non-empty samples"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form converges fast for small lambda.
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=20)
            .map(|k| {
                let m = (2 * k - 1) as f64;
                (-m * m * c).exp()
            })
            .sum();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let s: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    (2.0 * s).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value at
/// effective size `na·nb/(na+nb)`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<TestResult> {
    let d = ks_statistic(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ne = na * nb / (na + nb);
    let mut r = TestResult::new(TestKind::Ks, d, kolmogorov_sf(ne.sqrt() * d), alpha);
    if a.len().min(b.len()) < KS_SMALL_SAMPLE {
        r.flags.push("small_sample".into());
    }
    Ok(r)
}

/// Chi-square test of independence between group (observed vs imputed) and
/// category. Categories whose expected counts fall below five are pooled,
/// rarest first, into a shared bucket.
pub fn chi2_independence(observed: &[f64], imputed: &[f64], alpha: f64) -> Result<TestResult> {
    if observed.is_empty() || imputed.is_empty() {
        return Err(IqaError::degenerate("chi-square test needs two non-empty groups"));
    }
    let mut counts: BTreeMap<u64, [f64; 2]> = BTreeMap::new();
    for (g, vals) in [observed, imputed].into_iter().enumerate() {
        for v in vals {
            counts.entry(canonical_bits(*v)).or_insert([0.0; 2])[g] += 1.0;
        }
    }
    let n = [observed.len() as f64, imputed.len() as f64];
    let total = n[0] + n[1];
    let min_expected = |cell: &[f64; 2]| n[0].min(n[1]) * (cell[0] + cell[1]) / total;

    let mut cats: Vec<[f64; 2]> = counts.into_values().collect();
    // Stable: equal pooled counts keep ascending value order.
    cats.sort_by(|x, y| (x[0] + x[1]).total_cmp(&(y[0] + y[1])));
    let mut bucket: Option<[f64; 2]> = None;
    let mut merged = 0usize;
    let mut first = 0usize;
    loop {
        let remaining = &cats[first..];
        let ok = remaining.iter().all(|c| min_expected(c) >= MIN_EXPECTED_COUNT)
            && bucket.is_none_or(|b| min_expected(&b) >= MIN_EXPECTED_COUNT);
        if ok || remaining.is_empty() {
            break;
        }
        let c = cats[first];
        let b = bucket.get_or_insert([0.0; 2]);
        b[0] += c[0];
        b[1] += c[1];
        merged += 1;
        first += 1;
    }
    let mut table: Vec<[f64; 2]> = cats[first..].to_vec();
    table.extend(bucket);
    if table.len() < 2 {
        return Err(IqaError::degenerate(
            "fewer than two categories after pooling",
        ));
    }
    let stat: f64 = table
        .iter()
        .map(|cell| {
            let col = cell[0] + cell[1];
            (0..2)
                .map(|g| {
                    let e = n[g] * col / total;
                    (cell[g] - e).powi(2) / e
                })
                .sum::<f64>()
        })
        .sum();
    let df = (table.len() - 1) as f64;
    let dist = ChiSquared::new(df).map_err(|e| IqaError::invalid(e.to_string()))?;
    let mut r = TestResult::new(TestKind::ChiSquare, stat, dist.sf(stat), alpha);
    if merged > 0 {
        r.flags.push(format!("pooled_{merged}_categories"));
    }
    Ok(r)
}

fn canonical_bits(v: f64) -> u64 {
    if v == 0.0 {
        0.0f64.to_bits()
    } else {
        v.to_bits()
    }
}

/// KS for continuous columns, chi-square otherwise. A chi-square table that
/// collapses to one category cannot reject and is reported as such.
pub fn distribution_compatible(
    kind: ColumnKind,
    observed: &[f64],
    imputed: &[f64],
    alpha: f64,
) -> Result<TestResult> {
    if kind.is_continuous() {
        return ks_two_sample(observed, imputed, alpha);
    }
    match chi2_independence(observed, imputed, alpha) {
        Err(IqaError::DegenerateInput(_)) if !observed.is_empty() && !imputed.is_empty() => {
            let mut r = TestResult::new(TestKind::ChiSquare, 0.0, 1.0, alpha);
            r.flags.push("single_category".into());
            Ok(r)
        }
        other => other,
    }
}
