//! Imputation quality assessment.
//!
//! Each feature's observed cells are temporarily masked fold by fold and
//! re-imputed by every candidate imputer. The fold-mean similarity to the
//! original values is the imputation score δ; combined with completeness μ it
//! gives the quality score ω = μ + (1 − μ)·δ. Imputers whose re-imputations
//! are distinguishable from the truth by a KS or chi-square test are vetoed
//! before the best one is chosen.

mod efficiency;
mod pipeline;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depgraph::DependencyDict;
use crate::error::{IqaError, Result};
use crate::imputers::{self, ImputerFamily, ImputerSpec};
use crate::metrics::{accuracy, balanced_accuracy, nrmse_score, r2, ScorePair};
use crate::seed::derive_seed;
use crate::stats::{distribution_compatible, TestResult, DEFAULT_ALPHA};
use crate::table::{completeness, kfold_split, ColumnKind, SplitIndices, Table};

pub use efficiency::{efficiency, recommend_imputations, EfficiencyParams};
pub use pipeline::{
    apply_pipeline, apply_pipeline_with_report, deserialize_pipeline, encode_raw, fit_pipeline,
    serialize_pipeline, ApplyReport, ColumnSchema, PipelinePlan, PIPELINE_SCHEMA_VERSION,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scorer {
    /// `1 - RMSE / range`.
    Nrmse,
    BalancedAccuracy,
    Accuracy,
    R2,
}

impl Scorer {
    pub fn score(self, truth: &[f64], imputed: &[f64]) -> Result<ScoreValue> {
        let p = ScorePair::new(truth, imputed);
        let plain = |score| ScoreValue { score, flag: None };
        match self {
            Scorer::Nrmse => {
                let s = nrmse_score(&p)?;
                Ok(ScoreValue {
                    score: s.score,
                    flag: s.constant_target.then_some("constant_truth"),
                })
            }
            Scorer::BalancedAccuracy => match balanced_accuracy(&p) {
                Ok(s) => Ok(plain(s)),
                // One class in the held-out truth: recall averaging degenerates.
                Err(IqaError::DegenerateInput(_)) => Ok(ScoreValue {
                    score: accuracy(&p)?,
                    flag: Some("accuracy_fallback"),
                }),
                Err(e) => Err(e),
            },
            Scorer::Accuracy => Ok(plain(accuracy(&p)?)),
            Scorer::R2 => Ok(plain(r2(&p)?)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreValue {
    pub score: f64,
    pub flag: Option<&'static str>,
}

/// Scorer per column kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scorers {
    #[serde(default = "nrmse")]
    pub continuous: Scorer,
    #[serde(default = "nrmse")]
    pub discrete: Scorer,
    #[serde(default = "balanced")]
    pub binary: Scorer,
    #[serde(default = "balanced")]
    pub categorical: Scorer,
}

fn nrmse() -> Scorer {
    Scorer::Nrmse
}
fn balanced() -> Scorer {
    Scorer::BalancedAccuracy
}

impl Default for Scorers {
    fn default() -> Self {
        Scorers {
            continuous: nrmse(),
            discrete: nrmse(),
            binary: balanced(),
            categorical: balanced(),
        }
    }
}

impl Scorers {
    pub fn for_kind(&self, kind: ColumnKind) -> Scorer {
        match kind {
            ColumnKind::Continuous => self.continuous,
            ColumnKind::Discrete => self.discrete,
            ColumnKind::Binary => self.binary,
            ColumnKind::Categorical => self.categorical,
        }
    }
}

/// Everything `assess` and `fit_pipeline` need besides the data.
#[derive(Clone, Debug, PartialEq)]
pub struct AssessOptions {
    pub imputers: Vec<ImputerSpec>,
    pub n_splits: usize,
    pub split_seed: u64,
    pub scorers: Scorers,
    pub threshold: Option<f64>,
    pub alpha: f64,
    /// `None` lets every imputer see all other columns.
    pub dependencies: Option<DependencyDict>,
    pub seed: u64,
}

impl Default for AssessOptions {
    fn default() -> Self {
        AssessOptions {
            imputers: ImputerSpec::default_roster(),
            n_splits: 5,
            split_seed: 0,
            scorers: Scorers::default(),
            threshold: None,
            alpha: DEFAULT_ALPHA,
            dependencies: None,
            seed: 0,
        }
    }
}

impl AssessOptions {
    pub fn validate(&self) -> Result<()> {
        if self.imputers.is_empty() {
            return Err(IqaError::invalid("no imputers to assess"));
        }
        let mut ids: Vec<&str> = self.imputers.iter().map(|s| s.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(IqaError::invalid(format!("duplicate imputer id {:?}", w[0])));
        }
        if let Some(tau) = self.threshold {
            if !(0.0..=1.0).contains(&tau) {
                return Err(IqaError::invalid(format!("threshold {tau} outside [0, 1]")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(IqaError::invalid(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        if let Some(d) = &self.dependencies {
            d.validate()?;
        }
        Ok(())
    }

    /// The a-priori random imputer of the roster, or a default one.
    pub fn fallback_imputer(&self) -> ImputerSpec {
        self.imputers
            .iter()
            .find(|s| matches!(s.family, ImputerFamily::AppRandom))
            .cloned()
            .unwrap_or_else(ImputerSpec::random)
    }
}

/// Columns an imputer for `feature` may read, in order.
pub fn predictors_for(t: &Table, feature: &str, deps: Option<&DependencyDict>) -> Vec<String> {
    match deps {
        Some(d) => d
            .get(feature)
            .iter()
            .filter(|p| t.index_of(p).is_some())
            .cloned()
            .collect(),
        None => t
            .names()
            .into_iter()
            .filter(|&n| n != feature)
            .map(str::to_string)
            .collect(),
    }
}

/// Masked truth and its re-imputation for one fold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub truth: Vec<f64>,
    pub imputed: Vec<f64>,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImputationScore {
    /// Fold-mean score clamped to `[0, 1]`.
    pub mean: f64,
    pub std: f64,
    /// Unclamped fold mean.
    pub raw_mean: f64,
    pub folds: Vec<FoldOutcome>,
    pub flags: Vec<String>,
}

impl ImputationScore {
    pub fn pooled_truth(&self) -> Vec<f64> {
        self.folds.iter().flat_map(|f| f.truth.iter().copied()).collect()
    }

    pub fn pooled_imputed(&self) -> Vec<f64> {
        self.folds.iter().flat_map(|f| f.imputed.iter().copied()).collect()
    }
}

fn push_flag(flags: &mut Vec<String>, flag: &str) {
    if !flags.iter().any(|f| f == flag) {
        flags.push(flag.to_string());
    }
}

/// Mask-and-reimpute score of `spec` on `feature`.
///
/// For every fold the imputer is fitted on the training rows, then all
/// originally observed cells of `feature` in the test rows are masked,
/// re-imputed and scored against the originals. Folds without observed test
/// cells are skipped.
pub fn imputation_score(
    t: &Table,
    feature: &str,
    spec: &ImputerSpec,
    splits: &SplitIndices,
    scorer: Scorer,
    predictors: &[String],
    seed: u64,
) -> Result<ImputationScore> {
    let col = t.column(feature)?;
    let mut view_cols: Vec<&str> = predictors.iter().map(String::as_str).collect();
    view_cols.push(feature);
    let view = t.select(&view_cols)?;
    let mut folds = Vec::new();
    let mut flags = Vec::new();
    for (j, fold) in splits.folds.iter().enumerate() {
        let held: Vec<usize> = fold.test.iter().copied().filter(|&r| !col.is_missing(r)).collect();
        if held.is_empty() {
            push_flag(&mut flags, "fold_without_observed_cells");
            continue;
        }
        let fold_spec = spec.clone().with_seed(derive_seed(seed, &[j as u64]));
        let train = view.take_rows(&fold.train);
        let fitted = imputers::fit(&fold_spec, &train, feature, predictors)?;
        let mut test = view.take_rows(&held);
        let truth: Vec<f64> = held.iter().map(|&r| col.values[r]).collect();
        let masked = test.column_mut(feature)?;
        for r in 0..held.len() {
            masked.set(r, None);
        }
        let (out, report) = fitted.transform_with_report(&test)?;
        if report.knn_fallbacks > 0 {
            push_flag(&mut flags, "knn_global_mean_fallback");
        }
        let imputed = out.column(feature)?.values.clone();
        let s = scorer.score(&truth, &imputed)?;
        if let Some(f) = s.flag {
            push_flag(&mut flags, f);
        }
        folds.push(FoldOutcome {
            truth,
            imputed,
            score: s.score,
        });
    }
    if folds.is_empty() {
        return Err(IqaError::degenerate(format!(
            "{feature:?} has no observed cells in any test fold"
        )));
    }
    let n = folds.len() as f64;
    let raw_mean = folds.iter().map(|f| f.score).sum::<f64>() / n;
    let std = (folds.iter().map(|f| (f.score - raw_mean).powi(2)).sum::<f64>() / n).sqrt();
    let mean = raw_mean.clamp(0.0, 1.0);
    if mean != raw_mean {
        push_flag(&mut flags, "score_clamped");
    }
    Ok(ImputationScore {
        mean,
        std: std.min(1.0),
        raw_mean,
        folds,
        flags,
    })
}

/// Per-fold distribution test of re-imputations against the masked truth,
/// Bonferroni-combined: the feature is rejected when the smallest fold
/// p-value times the number of folds falls below `alpha`.
pub fn bias_veto(kind: ColumnKind, score: &ImputationScore, alpha: f64) -> Result<TestResult> {
    let k = score.folds.len();
    if k == 0 {
        return Err(IqaError::degenerate("no folds to test"));
    }
    let mut combined: Option<TestResult> = None;
    let mut max_stat = f64::NEG_INFINITY;
    let mut flags: Vec<String> = Vec::new();
    for fold in &score.folds {
        let r = distribution_compatible(kind, &fold.truth, &fold.imputed, alpha)?;
        max_stat = max_stat.max(r.statistic);
        for f in &r.flags {
            push_flag(&mut flags, f);
        }
        if combined.as_ref().is_none_or(|c| r.p_value < c.p_value) {
            combined = Some(r);
        }
    }
    let mut out = combined.expect("at least one fold");
    out.statistic = max_stat;
    out.p_value = (out.p_value * k as f64).min(1.0);
    out.flags = flags;
    Ok(out.at_level(alpha))
}

/// How one imputer fared on one feature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImputerOutcome {
    pub imputer: String,
    /// `None` when the imputer could not be trained or scored.
    pub delta_mean: Option<f64>,
    pub delta_std: Option<f64>,
    pub n_predictors: usize,
    pub verdict: Option<TestResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl ImputerOutcome {
    pub fn survives(&self) -> bool {
        self.delta_mean.is_some() && self.verdict.as_ref().is_some_and(|v| !v.rejected)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub imputer: String,
    pub fallback_used: bool,
}

/// Best surviving imputer: highest δ, then fewest predictors, then roster
/// order. With no survivor the a-priori random imputer `fallback` is used.
pub fn select_imputer(outcomes: &[ImputerOutcome], fallback: &str) -> Selection {
    let best = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.survives())
        .max_by(|(ia, a), (ib, b)| {
            let (da, db) = (a.delta_mean.unwrap_or(0.0), b.delta_mean.unwrap_or(0.0));
            da.total_cmp(&db)
                .then(b.n_predictors.cmp(&a.n_predictors))
                .then(ib.cmp(ia))
        });
    match best {
        Some((_, o)) => Selection {
            imputer: o.imputer.clone(),
            fallback_used: false,
        },
        None => Selection {
            imputer: fallback.to_string(),
            fallback_used: true,
        },
    }
}

/// ω = μ + (1 − μ)·δ.
pub fn quality_score(mu: f64, delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) || !(0.0..=1.0).contains(&delta) {
        return Err(IqaError::invalid(format!(
            "quality inputs must lie in [0, 1], got mu={mu}, delta={delta}"
        )));
    }
    Ok(mu + (1.0 - mu) * delta)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityRecord {
    pub feature: String,
    pub kind: ColumnKind,
    pub completeness: f64,
    pub imputers: Vec<ImputerOutcome>,
    pub chosen_imputer: String,
    pub delta: f64,
    pub delta_std: f64,
    pub omega: f64,
    pub kept: bool,
    pub fallback_used: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// Canonical assessment output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub schema_version: u32,
    pub seed: u64,
    pub threshold: Option<f64>,
    pub alpha: f64,
    pub records: Vec<QualityRecord>,
}

impl QualityReport {
    pub fn new(records: Vec<QualityRecord>, opts: &AssessOptions) -> Self {
        QualityReport {
            schema_version: REPORT_SCHEMA_VERSION,
            seed: opts.seed,
            threshold: opts.threshold,
            alpha: opts.alpha,
            records,
        }
    }
}

fn evaluate(
    t: &Table,
    feature_idx: usize,
    spec_idx: usize,
    splits: &SplitIndices,
    opts: &AssessOptions,
    spec: &ImputerSpec,
) -> ImputerOutcome {
    let col = &t.columns()[feature_idx];
    let predictors = if spec.family.is_univariate() {
        Vec::new()
    } else {
        predictors_for(t, &col.name, opts.dependencies.as_ref())
    };
    let seed = derive_seed(opts.seed, &[feature_idx as u64, spec_idx as u64]);
    let scorer = opts.scorers.for_kind(col.kind);
    let scored = imputation_score(t, &col.name, spec, splits, scorer, &predictors, seed)
        .and_then(|s| bias_veto(col.kind, &s, opts.alpha).map(|v| (s, v)));
    match scored {
        Ok((s, verdict)) => ImputerOutcome {
            imputer: spec.id.clone(),
            delta_mean: Some(s.mean),
            delta_std: Some(s.std),
            n_predictors: predictors.len(),
            verdict: Some(verdict),
            error: None,
            flags: s.flags,
        },
        Err(e) => ImputerOutcome {
            imputer: spec.id.clone(),
            delta_mean: None,
            delta_std: None,
            n_predictors: predictors.len(),
            verdict: None,
            error: Some(e.to_string()),
            flags: vec!["skipped".into()],
        },
    }
}

fn record_for(t: &Table, feature_idx: usize, outcomes: Vec<ImputerOutcome>, opts: &AssessOptions) -> QualityRecord {
    let col = &t.columns()[feature_idx];
    let fallback = opts.fallback_imputer();
    let mut flags = Vec::new();
    let mu = completeness(col).unwrap_or(0.0);
    let (chosen, fallback_used, delta, delta_std) = if col.is_all_missing() {
        push_flag(&mut flags, "all_missing");
        (fallback.id.clone(), true, 0.0, 0.0)
    } else {
        let sel = select_imputer(&outcomes, &fallback.id);
        let chosen = outcomes.iter().find(|o| o.imputer == sel.imputer);
        let delta = chosen.and_then(|o| o.delta_mean).unwrap_or(0.0);
        let std = chosen.and_then(|o| o.delta_std).unwrap_or(0.0);
        if chosen.is_none() || chosen.is_some_and(|o| o.delta_mean.is_none()) {
            push_flag(&mut flags, "fallback_not_scored");
        }
        (sel.imputer, sel.fallback_used, delta, std)
    };
    let omega = quality_score(mu, delta).expect("inputs clamped to [0, 1]");
    QualityRecord {
        feature: col.name.clone(),
        kind: col.kind,
        completeness: mu,
        imputers: outcomes,
        chosen_imputer: chosen,
        delta,
        delta_std,
        omega,
        kept: opts.threshold.is_none_or(|tau| omega >= tau),
        fallback_used,
        flags,
    }
}

/// Quality record for every column of `t`.
///
/// The (feature, imputer) grid runs in parallel; results are gathered in
/// grid order so the output does not depend on scheduling.
pub fn assess(t: &Table, opts: &AssessOptions) -> Result<Vec<QualityRecord>> {
    opts.validate()?;
    let splits = kfold_split(t.n_rows(), opts.n_splits, opts.split_seed)?;
    let mut roster = opts.imputers.clone();
    if !roster.iter().any(|s| matches!(s.family, ImputerFamily::AppRandom)) {
        roster.push(ImputerSpec::random());
    }
    let grid: Vec<(usize, usize)> = (0..t.n_cols())
        .flat_map(|f| (0..roster.len()).map(move |i| (f, i)))
        .collect();
    let outcomes: Vec<ImputerOutcome> = grid
        .par_iter()
        .map(|&(f, i)| evaluate(t, f, i, &splits, opts, &roster[i]))
        .collect();
    let mut outcomes = outcomes.into_iter();
    let opts = AssessOptions {
        imputers: roster.clone(),
        ..opts.clone()
    };
    Ok((0..t.n_cols())
        .map(|f| {
            let per: Vec<ImputerOutcome> = outcomes.by_ref().take(roster.len()).collect();
            record_for(t, f, per, &opts)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::EstimatorSpec;
    use crate::table::Column;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn outcome(id: &str, delta: f64, n_pred: usize, rejected: bool) -> ImputerOutcome {
        ImputerOutcome {
            imputer: id.into(),
            delta_mean: Some(delta),
            delta_std: Some(0.0),
            n_predictors: n_pred,
            verdict: Some(TestResult {
                test: crate::stats::TestKind::Ks,
                statistic: 0.0,
                p_value: if rejected { 0.0 } else { 1.0 },
                alpha: 0.05,
                rejected,
                flags: vec![],
            }),
            error: None,
            flags: vec![],
        }
    }

    #[test]
    fn quality_examples() {
        assert_eq!(quality_score(1.0, 0.3).unwrap(), 1.0);
        assert_eq!(quality_score(0.0, 1.0).unwrap(), 1.0);
        assert!((quality_score(0.8, 0.5).unwrap() - 0.9).abs() < 1e-15);
        assert!(quality_score(1.1, 0.5).is_err());
        assert!(quality_score(0.5, -0.1).is_err());
    }

    #[test]
    fn algorithm_form_is_identical() {
        for i in 0..=20 {
            for j in 0..=20 {
                let (mis, delta) = (i as f64 / 20.0, j as f64 / 20.0);
                let alg = mis * delta + (1.0 - mis) * 1.0;
                let eq = quality_score(1.0 - mis, delta).unwrap();
                assert!((alg - eq).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn selection_rules() {
        let s = select_imputer(&[outcome("a", 0.7, 0, false), outcome("b", 0.9, 0, false)], "r");
        assert_eq!(s.imputer, "b");
        let s = select_imputer(&[outcome("a", 0.7, 0, true), outcome("b", 0.9, 0, true)], "r");
        assert_eq!(s, Selection { imputer: "r".into(), fallback_used: true });
        let s = select_imputer(&[outcome("a", 0.7, 0, false), outcome("b", 0.9, 0, true)], "r");
        assert_eq!(s.imputer, "a");
        let s = select_imputer(&[outcome("a", 0.8, 3, false), outcome("b", 0.8, 1, false)], "r");
        assert_eq!(s.imputer, "b");
        let s = select_imputer(&[outcome("a", 0.8, 1, false), outcome("b", 0.8, 1, false)], "r");
        assert_eq!(s.imputer, "a");
    }

    #[test]
    fn constant_column_scores_one() {
        let t = Table::new(vec![
            Column::from_values("c", vec![3.0; 40]),
            Column::from_values("x", (0..40).map(f64::from).collect()),
        ])
        .unwrap();
        let splits = kfold_split(40, 5, 0).unwrap();
        for spec in [ImputerSpec::mean(), ImputerSpec::random(), ImputerSpec::knn(3)] {
            let s = imputation_score(&t, "c", &spec, &splits, Scorer::Nrmse, &["x".into()], 1)
                .unwrap();
            assert_eq!(s.mean, 1.0, "{}", spec.id);
        }
    }

    #[test]
    fn only_observed_cells_are_scored() {
        let cells: Vec<Option<f64>> = (0..50)
            .map(|i| if i % 5 == 0 { None } else { Some(f64::from(i)) })
            .collect();
        let t = Table::new(vec![Column::from_options("y", &cells)]).unwrap();
        let splits = kfold_split(50, 5, 0).unwrap();
        let s = imputation_score(&t, "y", &ImputerSpec::mean(), &splits, Scorer::Nrmse, &[], 0)
            .unwrap();
        assert_eq!(s.pooled_truth().len(), 40);
        assert!(s.pooled_truth().iter().all(|v| v.is_finite()));
    }

    fn linear_pair(n: usize, seed: u64) -> Table {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let y: Vec<Option<f64>> = x
            .iter()
            .map(|v| (rng.gen::<f64>() >= 0.3).then_some(2.0 * v))
            .collect();
        Table::new(vec![Column::from_values("x", x), Column::from_options("y", &y)]).unwrap()
    }

    #[test]
    fn iterative_beats_random_on_linear_signal() {
        let t = linear_pair(200, 4);
        let splits = kfold_split(200, 5, 0).unwrap();
        let preds = vec!["x".to_string()];
        let it = ImputerSpec::iterative("iter_br", EstimatorSpec::ridge());
        let a = imputation_score(&t, "y", &it, &splits, Scorer::Nrmse, &preds, 0).unwrap();
        let b = imputation_score(&t, "y", &ImputerSpec::random(), &splits, Scorer::Nrmse, &[], 0)
            .unwrap();
        assert!(a.mean > b.mean + 0.2, "{} vs {}", a.mean, b.mean);
        // Random pairing of two U(0, 2) draws: RMSE = 2/√6 of the range.
        assert!((b.mean - (1.0 - 1.0 / 6f64.sqrt())).abs() < 0.06, "{}", b.mean);
    }

    #[test]
    fn mean_spike_is_vetoed_on_skewed_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 400;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let y: Vec<Option<f64>> = x
            .iter()
            .map(|v| (rng.gen::<f64>() >= 0.3).then_some((3.0 * v).exp()))
            .collect();
        let t = Table::new(vec![Column::from_values("x", x), Column::from_options("y", &y)])
            .unwrap();
        let opts = AssessOptions {
            imputers: vec![
                ImputerSpec::mean(),
                ImputerSpec::iterative("iter_br", EstimatorSpec::random_forest(30)),
                ImputerSpec::random(),
            ],
            ..AssessOptions::default()
        };
        let recs = assess(&t, &opts).unwrap();
        let y = &recs[1];
        let mean = &y.imputers[0];
        assert!(mean.verdict.as_ref().unwrap().rejected);
        assert_eq!(y.chosen_imputer, "iter_br");
        assert!(!y.fallback_used);
    }

    #[test]
    fn assess_is_reproducible_and_exact() {
        let t = linear_pair(120, 6);
        let opts = AssessOptions {
            imputers: vec![ImputerSpec::mean(), ImputerSpec::knn(3)],
            threshold: Some(0.95),
            ..AssessOptions::default()
        };
        let a = assess(&t, &opts).unwrap();
        assert_eq!(a, assess(&t, &opts).unwrap());
        for r in &a {
            assert_eq!(r.omega, r.completeness + (1.0 - r.completeness) * r.delta);
            assert_eq!(r.kept, r.omega >= 0.95);
            assert!(r.imputers.iter().any(|o| o.imputer == "random"));
        }
        assert_eq!(a[0].omega, 1.0);
    }

    #[test]
    fn all_missing_feature() {
        let t = Table::new(vec![
            Column::from_options("gone", &[None; 20]),
            Column::from_values("x", (0..20).map(f64::from).collect()),
        ])
        .unwrap();
        let recs = assess(&t, &AssessOptions::default()).unwrap();
        assert_eq!((recs[0].delta, recs[0].omega), (0.0, 0.0));
        assert!(recs[0].flags.contains(&"all_missing".to_string()));
        assert!(recs[0].imputers.iter().all(|o| o.delta_mean.is_none()));
    }
}
