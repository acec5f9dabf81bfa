//! Imputers behind a uniform fit/transform contract.
//!
//! Every imputer is fitted for one target column and an ordered list of
//! predictor columns. `transform` only ever writes the target column's
//! missing cells, and pseudo-rounds them according to the target's kind.

mod iterative;
mod knn;
mod rounding;
mod spec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{IqaError, Result};
use crate::table::{Column, ColumnKind, Table};

pub use iterative::IterativeState;
pub use knn::{knn_impute, nan_euclidean, KnnState};
pub use rounding::{
    adaptive_cutoff, adaptive_round_binary, censor_to_observed, censor_value, RoundingRule,
};
pub use spec::{
    ImputerFamily, ImputerSpec, SimpleStrategy, DEFAULT_ITERATIVE_TOLERANCE, DEFAULT_MAX_ITER,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ImputerState {
    Constant { value: f64 },
    /// Observed values, sorted, with repeats.
    Empirical { values: Vec<f64> },
    Knn(KnnState),
    Iterative(IterativeState),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedImputer {
    pub spec: ImputerSpec,
    pub target: String,
    pub predictors: Vec<String>,
    pub target_kind: ColumnKind,
    pub rounding: RoundingRule,
    /// Distinct observed target values, sorted.
    pub observed_values: Vec<f64>,
    pub state: ImputerState,
}

/// Side information from a transform call.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformReport {
    pub filled: usize,
    /// KNN queries sharing no coordinate with any reference row.
    pub knn_fallbacks: usize,
}

/// Statistic of a non-empty slice for the simple strategies. Mode ties go to
/// the smallest value.
pub fn simple_statistic(values: &[f64], strategy: SimpleStrategy) -> f64 {
    debug_assert!(!values.is_empty());
    let n = values.len();
    match strategy {
        SimpleStrategy::Mean => values.iter().sum::<f64>() / n as f64,
        SimpleStrategy::Median => {
            let mut v = values.to_vec();
            v.sort_by(f64::total_cmp);
            if n % 2 == 1 {
                v[n / 2]
            } else {
                (v[n / 2 - 1] + v[n / 2]) / 2.0
            }
        }
        SimpleStrategy::Mode => {
            let mut v = values.to_vec();
            v.sort_by(f64::total_cmp);
            let (mut best, mut best_n) = (v[0], 0);
            let mut i = 0;
            while i < n {
                let mut j = i;
                while j < n && v[j] == v[i] {
                    j += 1;
                }
                if j - i > best_n {
                    best = v[i];
                    best_n = j - i;
                }
                i = j;
            }
            best
        }
    }
}

fn untrainable(spec: &ImputerSpec, target: &str, reason: &str) -> IqaError {
    IqaError::UntrainableImputer {
        imputer: spec.id.clone(),
        column: target.to_string(),
        reason: reason.to_string(),
    }
}

/// Fits `spec` to impute `target` in `train` from `predictors`.
pub fn fit(
    spec: &ImputerSpec,
    train: &Table,
    target: &str,
    predictors: &[String],
) -> Result<FittedImputer> {
    let target_col = train.column(target)?;
    if predictors.iter().any(|p| p == target) {
        return Err(IqaError::invalid(format!(
            "predictors of {target:?} include the target itself"
        )));
    }
    for p in predictors {
        train.column(p)?;
    }
    if train.n_rows() == 0 {
        return Err(untrainable(spec, target, "training table is empty"));
    }
    let observed = target_col.observed();
    if observed.is_empty() {
        return Err(untrainable(spec, target, "target has no observed values"));
    }
    // Univariate families never look at predictors.
    let predictors: Vec<String> = if spec.family.is_univariate() {
        Vec::new()
    } else {
        predictors.to_vec()
    };
    let state = match &spec.family {
        ImputerFamily::Simple { strategy } => ImputerState::Constant {
            value: simple_statistic(&observed, *strategy),
        },
        ImputerFamily::AppRandom => {
            let mut values = observed.clone();
            values.sort_by(f64::total_cmp);
            ImputerState::Empirical { values }
        }
        ImputerFamily::Knn { n_neighbors } => {
            ImputerState::Knn(KnnState::fit(train, target, &predictors, *n_neighbors)?)
        }
        ImputerFamily::Iterative { .. } => ImputerState::Iterative(IterativeState::fit(
            spec,
            train,
            target,
            &predictors,
        )?),
    };
    Ok(FittedImputer {
        spec: spec.clone(),
        target: target.to_string(),
        predictors,
        target_kind: target_col.kind,
        rounding: RoundingRule::for_kind(target_col.kind),
        observed_values: target_col.distinct_observed(),
        state,
    })
}

/// Draws `n` values with replacement from an empirical state.
pub fn apprandom_sample(state: &ImputerState, n: usize, seed: u64) -> Result<Vec<f64>> {
    let ImputerState::Empirical { values } = state else {
        return Err(IqaError::invalid("not an a-priori random imputer state"));
    };
    if values.is_empty() {
        return Err(IqaError::UntrainableImputer {
            imputer: "random".into(),
            column: String::new(),
            reason: "no observed values to sample".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| values[rng.gen_range(0..values.len())])
        .collect())
}

impl FittedImputer {
    pub fn transform(&self, t: &Table) -> Result<Table> {
        Ok(self.transform_with_report(t)?.0)
    }

    pub fn transform_with_report(&self, t: &Table) -> Result<(Table, TransformReport)> {
        let col = t.column(&self.target)?;
        for p in &self.predictors {
            t.column(p)?;
        }
        let missing: Vec<usize> = (0..t.n_rows()).filter(|&r| col.is_missing(r)).collect();
        let mut report = TransformReport {
            filled: missing.len(),
            ..TransformReport::default()
        };
        if missing.is_empty() {
            return Ok((t.clone(), report));
        }
        let raw: Vec<f64> = match &self.state {
            ImputerState::Constant { value } => vec![*value; missing.len()],
            ImputerState::Empirical { .. } => {
                apprandom_sample(&self.state, missing.len(), self.spec.seed)?
            }
            ImputerState::Knn(state) => {
                let (vals, fallbacks) = state.impute_rows(t, &missing)?;
                report.knn_fallbacks = fallbacks;
                vals
            }
            ImputerState::Iterative(state) => state.impute_target(t, &missing)?,
        };
        let rounded = self.round(col, &missing, &raw);
        let mut out_col = col.clone();
        for (&r, v) in missing.iter().zip(rounded) {
            out_col.set(r, Some(v));
        }
        let mut out = t.clone();
        out.replace_column(out_col)?;
        Ok((out, report))
    }

    fn round(&self, col: &Column, missing: &[usize], raw: &[f64]) -> Vec<f64> {
        let set = &self.observed_values;
        match self.rounding {
            RoundingRule::None => raw.to_vec(),
            RoundingRule::CensorToObserved => censor_to_observed(raw, set),
            RoundingRule::AdaptiveBinary if set.len() < 2 => censor_to_observed(raw, set),
            RoundingRule::AdaptiveBinary => {
                let (lo, hi) = (set[0], set[set.len() - 1]);
                let scale = |v: f64| (v - lo) / (hi - lo);
                // Marginal over the column after imputation.
                let mut sum: f64 = col.observed().into_iter().map(scale).sum();
                sum += raw.iter().map(|&v| scale(v)).sum::<f64>();
                let marginal = sum / (col.n_observed() + missing.len()) as f64;
                let scaled: Vec<f64> = raw.iter().map(|&v| scale(v)).collect();
                adaptive_round_binary(&scaled, marginal)
                    .into_iter()
                    .map(|b| if b == 1.0 { hi } else { lo })
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::EstimatorSpec;

    fn table(cols: Vec<Column>) -> Table {
        Table::new(cols).unwrap()
    }

    #[test]
    fn simple_statistics() {
        assert_eq!(simple_statistic(&[1., 2., 3.], SimpleStrategy::Mean), 2.0);
        assert_eq!(simple_statistic(&[0., 0., 1.], SimpleStrategy::Mode), 0.0);
        assert_eq!(simple_statistic(&[3., 1., 1., 3.], SimpleStrategy::Mode), 1.0);
        assert_eq!(simple_statistic(&[4., 1., 2., 3.], SimpleStrategy::Median), 2.5);
    }

    #[test]
    fn mean_fill() {
        let t = table(vec![Column::from_options("x", &[Some(1.), Some(2.), Some(3.), None])]);
        let f = fit(&ImputerSpec::mean(), &t, "x", &[]).unwrap();
        let out = f.transform(&t).unwrap();
        assert_eq!(out.column("x").unwrap().values, vec![1., 2., 3., 2.]);
    }

    #[test]
    fn no_missing_is_identity() {
        let t = table(vec![Column::from_values("x", vec![1., 5.])]);
        let f = fit(&ImputerSpec::random(), &t, "x", &[]).unwrap();
        assert_eq!(f.transform(&t).unwrap(), t);
    }

    #[test]
    fn constant_column_random_is_exact() {
        let mut cells = vec![Some(7.0); 20];
        cells[3] = None;
        cells[11] = None;
        let t = table(vec![Column::from_options("c", &cells)]);
        let f = fit(&ImputerSpec::random(), &t, "c", &[]).unwrap();
        assert_eq!(f.transform(&t).unwrap().column("c").unwrap().values, vec![7.0; 20]);
    }

    #[test]
    fn fully_missing_target_is_untrainable() {
        let t = table(vec![
            Column::from_options("x", &[None, None]),
            Column::from_values("p", vec![1., 2.]),
        ]);
        for spec in [ImputerSpec::mean(), ImputerSpec::random(), ImputerSpec::knn(3)] {
            assert!(matches!(
                fit(&spec, &t, "x", &["p".into()]),
                Err(IqaError::UntrainableImputer { .. })
            ));
        }
    }

    #[test]
    fn apprandom_frequencies() {
        let mut values = vec![0.0; 50];
        values.extend([1.0; 30]);
        values.extend([2.0; 20]);
        let state = ImputerState::Empirical { values };
        let draws = apprandom_sample(&state, 10_000, 17).unwrap();
        for (v, p) in [(0.0, 0.5), (1.0, 0.3), (2.0, 0.2)] {
            let f = draws.iter().filter(|&&d| d == v).count() as f64 / 1e4;
            assert!((f - p).abs() < 0.02, "{v}: {f}");
        }
        assert!(apprandom_sample(&state, 0, 1).unwrap().is_empty());
        let empty = ImputerState::Empirical { values: vec![] };
        assert!(matches!(
            apprandom_sample(&empty, 3, 1),
            Err(IqaError::UntrainableImputer { .. })
        ));
    }

    #[test]
    fn binary_target_rounded_to_levels() {
        let cells: Vec<Option<f64>> = (0..40)
            .map(|i| if i % 7 == 0 { None } else { Some(f64::from(u8::from(i % 3 == 0))) })
            .collect();
        let t = table(vec![Column::from_options("b", &cells).with_kind(ColumnKind::Binary)]);
        let f = fit(&ImputerSpec::mean(), &t, "b", &[]).unwrap();
        assert_eq!(f.rounding, RoundingRule::AdaptiveBinary);
        let out = f.transform(&t).unwrap();
        assert!(out.column("b").unwrap().values.iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn transform_touches_only_target_missing_cells() {
        let t = table(vec![
            Column::from_options("y", &[Some(2.), None, Some(6.), None, Some(10.)]),
            Column::from_options("x", &[Some(1.), Some(2.), None, Some(4.), Some(5.)]),
        ]);
        let spec = ImputerSpec::iterative("it", EstimatorSpec::ridge());
        let f = fit(&spec, &t, "y", &["x".into()]).unwrap();
        let out = f.transform(&t).unwrap();
        assert_eq!(out.column("x").unwrap(), t.column("x").unwrap());
        let y = out.column("y").unwrap();
        assert_eq!(y.n_missing(), 0);
        for r in [0, 2, 4] {
            assert_eq!(y.values[r], t.column("y").unwrap().values[r]);
        }
    }
}
