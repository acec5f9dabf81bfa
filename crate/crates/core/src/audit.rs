//! Detectability audit.
//!
//! A dataset is completed fold by fold by an imputation strategy; then, for
//! every feature, a boosted classifier tries to tell which of its cells were
//! imputed, looking at all completed columns. Lower AUROC is better: 0.5
//! means imputed cells are indistinguishable from observed ones.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{apply_pipeline, assess, fit_pipeline, predictors_for, AssessOptions, PipelinePlan};
use crate::error::{IqaError, Result};
use crate::estimators::{gbt_fit, Design, GbtLoss, GbtParams};
use crate::imputers::{self, ImputerSpec};
use crate::metrics::{auroc, mean_ci};
use crate::seed::derive_seed;
use crate::table::{inject_mcar, kfold_split, stratified_kfold_split, Table};

pub const AUDIT_SCHEMA_VERSION: u32 = 1;

/// Features with fewer imputed or observed cells are skipped.
pub const MIN_CLASS_COUNT: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditOptions {
    pub folds: usize,
    pub n_estimators: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub ci_level: f64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            folds: 5,
            n_estimators: 100,
            max_depth: 6,
            learning_rate: 0.1,
            ci_level: 0.95,
        }
    }
}

/// A way of filling every missing cell of a table.
#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    /// One imputer for every feature, reading all other columns.
    Uniform { name: String, imputer: ImputerSpec },
    /// Imputers chosen per feature by a quality assessment of the training
    /// rows. The threshold is ignored: every feature is kept.
    Assessed { name: String, options: AssessOptions },
}

impl Strategy {
    pub fn uniform(imputer: ImputerSpec) -> Self {
        Strategy::Uniform {
            name: imputer.id.clone(),
            imputer,
        }
    }

    pub fn assessed(name: impl Into<String>, options: AssessOptions) -> Self {
        Strategy::Assessed {
            name: name.into(),
            options,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Strategy::Uniform { name, .. } | Strategy::Assessed { name, .. } => name,
        }
    }

    /// Pipeline fitted on `train`.
    pub fn fit(&self, train: &Table, seed: u64) -> Result<PipelinePlan> {
        match self {
            Strategy::Uniform { imputer, .. } => {
                let mut fitted = Vec::new();
                for (j, col) in train.columns().iter().enumerate() {
                    let spec = imputer.clone().with_seed(derive_seed(seed, &[j as u64]));
                    let preds = if spec.family.is_univariate() {
                        Vec::new()
                    } else {
                        predictors_for(train, &col.name, None)
                    };
                    fitted.push(imputers::fit(&spec, train, &col.name, &preds)?);
                }
                Ok(PipelinePlan {
                    schema_version: crate::engine::PIPELINE_SCHEMA_VERSION,
                    columns: train.columns().iter().map(Into::into).collect(),
                    drop_list: Vec::new(),
                    imputers: fitted,
                    dependencies: None,
                    seed,
                    config_hash: None,
                    flags: BTreeMap::new(),
                })
            }
            Strategy::Assessed { options, .. } => {
                let opts = AssessOptions {
                    threshold: None,
                    seed,
                    ..options.clone()
                };
                let records = assess(train, &opts)?;
                fit_pipeline(train, &records, &opts, None)
            }
        }
    }
}

/// Completed dataset D′ plus the original missing mask per column.
#[derive(Clone, Debug, PartialEq)]
pub struct Completed {
    pub table: Table,
    pub mask: Vec<Vec<bool>>,
}

/// Fits `strategy` on each training fold and imputes the matching test
/// fold; the imputed slices are reassembled in the original row order.
pub fn build_completed_dataset(t: &Table, strategy: &Strategy, k: usize, seed: u64) -> Result<Completed> {
    let mask: Vec<Vec<bool>> = t.columns().iter().map(|c| c.mask.clone()).collect();
    let splits = kfold_split(t.n_rows(), k, seed)?;
    let slices: Vec<(Vec<usize>, Table)> = splits
        .folds
        .par_iter()
        .enumerate()
        .map(|(j, fold)| {
            let plan = strategy.fit(&t.take_rows(&fold.train), derive_seed(seed, &[j as u64]))?;
            let out = apply_pipeline(&plan, &t.take_rows(&fold.test))?;
            Ok((fold.test.clone(), out))
        })
        .collect::<Result<_>>()?;
    let mut columns = t.clone().into_columns();
    for (rows, slice) in &slices {
        for (col, src) in columns.iter_mut().zip(slice.columns()) {
            for (i, &r) in rows.iter().enumerate() {
                col.set(r, src.get(i));
            }
        }
    }
    let table = if columns.is_empty() {
        t.clone()
    } else {
        Table::new(columns)?
    };
    if table.total_missing() > 0 {
        return Err(IqaError::degenerate(format!(
            "strategy {:?} left {} cells missing",
            strategy.name(),
            table.total_missing()
        )));
    }
    Ok(Completed { table, mask })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FeatureAudit {
    Scored {
        auroc: f64,
        ci_half_width: f64,
        fold_aurocs: Vec<f64>,
    },
    Skipped {
        reason: String,
    },
    Failed {
        error: String,
    },
}

impl FeatureAudit {
    pub fn auroc(&self) -> Option<f64> {
        match self {
            FeatureAudit::Scored { auroc, .. } => Some(*auroc),
            _ => None,
        }
    }
}

/// Cross-validated AUROC of predicting `mask_x` from every column of `d`.
pub fn audit_feature(d: &Table, mask_x: &[bool], opts: &AuditOptions, seed: u64) -> Result<FeatureAudit> {
    if mask_x.len() != d.n_rows() {
        return Err(IqaError::invalid("mask length differs from the table"));
    }
    let pos = mask_x.iter().filter(|&&m| m).count();
    let neg = mask_x.len() - pos;
    let needed = MIN_CLASS_COUNT.max(2 * opts.folds);
    if pos < needed || neg < needed {
        return Ok(FeatureAudit::Skipped {
            reason: format!("{pos} imputed and {neg} observed cells, need {needed} of each"),
        });
    }
    let x = Design::with_rows(
        d.columns().iter().map(|c| c.values.clone()).collect(),
        d.n_rows(),
    )?;
    let y: Vec<f64> = mask_x.iter().map(|&m| f64::from(u8::from(m))).collect();
    let splits = stratified_kfold_split(mask_x, opts.folds, seed)?;
    let params = GbtParams {
        n_estimators: opts.n_estimators,
        max_depth: opts.max_depth,
        learning_rate: opts.learning_rate,
        loss: GbtLoss::Logistic,
        seed,
    };
    let fold_aurocs: Vec<f64> = splits
        .folds
        .par_iter()
        .map(|fold| {
            let y_train: Vec<f64> = fold.train.iter().map(|&r| y[r]).collect();
            let model = gbt_fit(&x.take_rows(&fold.train), &y_train, &params)?;
            let scores = model.predict_proba(&x.take_rows(&fold.test))?;
            let labels: Vec<bool> = fold.test.iter().map(|&r| mask_x[r]).collect();
            auroc(&labels, &scores)
        })
        .collect::<Result<_>>()?;
    let (mean, half) = mean_ci(&fold_aurocs, opts.ci_level)?;
    Ok(FeatureAudit::Scored {
        auroc: mean,
        ci_half_width: half,
        fold_aurocs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureEntry {
    pub feature: String,
    pub result: FeatureAudit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub schema_version: u32,
    pub missingness_level: f64,
    /// Missing fraction actually present after injection.
    pub realised_missingness: f64,
    pub strategy: String,
    pub per_feature: Vec<FeatureEntry>,
    /// Mean AUROC over scored features; lower is better.
    pub strategy_average: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// MCAR rate that lifts a table at `current` missingness to `level`.
pub fn injection_rate(current: f64, level: f64) -> f64 {
    if level <= current || current >= 1.0 {
        0.0
    } else {
        (level - current) / (1.0 - current)
    }
}

/// Runs the audit for every level and strategy, levels outermost.
pub fn audit_all(
    t: &Table,
    strategies: &[Strategy],
    levels: &[f64],
    opts: &AuditOptions,
    seed: u64,
) -> Result<Vec<AuditReport>> {
    if let Some(bad) = levels.iter().find(|l| !(0.0..1.0).contains(*l)) {
        return Err(IqaError::invalid(format!("missingness level {bad} outside [0, 1)")));
    }
    let mut reports = Vec::new();
    for (li, &level) in levels.iter().enumerate() {
        let rate = injection_rate(t.overall_missing_fraction(), level);
        let data = inject_mcar(t, rate, derive_seed(seed, &[li as u64]), &[])?;
        let realised = data.overall_missing_fraction();
        for (si, strategy) in strategies.iter().enumerate() {
            let s = derive_seed(seed, &[li as u64, si as u64]);
            let mut report = AuditReport {
                schema_version: AUDIT_SCHEMA_VERSION,
                missingness_level: level,
                realised_missingness: realised,
                strategy: strategy.name().to_string(),
                per_feature: Vec::new(),
                strategy_average: None,
                error: None,
            };
            match build_completed_dataset(&data, strategy, opts.folds, s) {
                Ok(done) => {
                    report.per_feature = done
                        .mask
                        .par_iter()
                        .enumerate()
                        .map(|(j, m)| FeatureEntry {
                            feature: data.columns()[j].name.clone(),
                            result: audit_feature(&done.table, m, opts, derive_seed(s, &[j as u64]))
                                .unwrap_or_else(|e| FeatureAudit::Failed {
                                    error: e.to_string(),
                                }),
                        })
                        .collect();
                    let scored: Vec<f64> =
                        report.per_feature.iter().filter_map(|f| f.result.auroc()).collect();
                    if !scored.is_empty() {
                        report.strategy_average =
                            Some(scored.iter().sum::<f64>() / scored.len() as f64);
                    }
                }
                Err(e) => report.error = Some(e.to_string()),
            }
            reports.push(report);
        }
    }
    Ok(reports)
}

fn cell(result: Option<&FeatureAudit>) -> String {
    match result {
        Some(FeatureAudit::Scored {
            auroc,
            ci_half_width,
            ..
        }) => format!("{auroc:.2}±{ci_half_width:.2}"),
        Some(FeatureAudit::Failed { .. }) => "error".into(),
        _ => "---".into(),
    }
}

/// Feature rows by strategy columns, one block per level, with an average
/// row closing each block.
pub fn audit_tables_csv(reports: &[AuditReport]) -> Result<String> {
    let mut levels: Vec<f64> = Vec::new();
    let mut strategies: Vec<&str> = Vec::new();
    for r in reports {
        if !levels.contains(&r.missingness_level) {
            levels.push(r.missingness_level);
        }
        if !strategies.contains(&r.strategy.as_str()) {
            strategies.push(&r.strategy);
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["level".to_string(), "feature".to_string()];
    header.extend(strategies.iter().map(|s| s.to_string()));
    w.write_record(&header).map_err(|e| IqaError::Csv(e.to_string()))?;
    for level in levels {
        let block: Vec<&AuditReport> = reports.iter().filter(|r| r.missingness_level == level).collect();
        let mut features: Vec<&str> = Vec::new();
        for r in &block {
            for f in &r.per_feature {
                if !features.contains(&f.feature.as_str()) {
                    features.push(&f.feature);
                }
            }
        }
        let find = |s: &str| block.iter().find(|r| r.strategy == s);
        for feat in features {
            let mut row = vec![level.to_string(), feat.to_string()];
            for s in &strategies {
                let res = find(s).and_then(|r| r.per_feature.iter().find(|f| f.feature == feat));
                row.push(cell(res.map(|f| &f.result)));
            }
            w.write_record(&row).map_err(|e| IqaError::Csv(e.to_string()))?;
        }
        let mut row = vec![level.to_string(), "average".to_string()];
        for s in &strategies {
            row.push(
                find(s)
                    .and_then(|r| r.strategy_average)
                    .map_or("---".to_string(), |a| format!("{a:.2}")),
            );
        }
        w.write_record(&row).map_err(|e| IqaError::Csv(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| IqaError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| IqaError::Csv(e.to_string()))
}
