//! Trainable imputation pipelines: fit once, apply to new tables, persist as
//! versioned JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{predictors_for, AssessOptions, QualityRecord};
use crate::depgraph::DependencyDict;
use crate::error::{IqaError, Result};
use crate::imputers::{self, FittedImputer};
use crate::seed::derive_seed;
use crate::table::{Column, ColumnKind, RawTable, Table};

pub const PIPELINE_SCHEMA_VERSION: u32 = 1;

/// Stream tag separating pipeline fitting seeds from assessment seeds.
const FIT_STREAM: u64 = 0x5049_5045;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    /// Category dictionary; code `i` stands for `labels[i]`.
    pub labels: Option<Vec<String>>,
}

impl From<&Column> for ColumnSchema {
    fn from(c: &Column) -> Self {
        ColumnSchema {
            name: c.name.clone(),
            kind: c.kind,
            labels: c.labels.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelinePlan {
    pub schema_version: u32,
    pub columns: Vec<ColumnSchema>,
    /// Features removed from the output; they still feed other imputers.
    pub drop_list: Vec<String>,
    /// One imputer per kept feature, in column order.
    pub imputers: Vec<FittedImputer>,
    pub dependencies: Option<DependencyDict>,
    pub seed: u64,
    pub config_hash: Option<String>,
    /// Per-feature notes, e.g. why a feature was dropped.
    #[serde(default)]
    pub flags: BTreeMap<String, String>,
}

impl PipelinePlan {
    pub fn output_columns(&self) -> Vec<&str> {
        self.columns
            .iter()
            .map(|c| c.name.as_str())
            .filter(|n| !self.drop_list.iter().any(|d| d == n))
            .collect()
    }
}

/// Fits the chosen imputer of every kept feature on the whole table.
pub fn fit_pipeline(
    t: &Table,
    records: &[QualityRecord],
    opts: &AssessOptions,
    config_hash: Option<String>,
) -> Result<PipelinePlan> {
    let fallback = opts.fallback_imputer();
    let mut drop_list = Vec::new();
    let mut fitted = Vec::new();
    let mut flags = BTreeMap::new();
    for (idx, col) in t.columns().iter().enumerate() {
        let rec = records
            .iter()
            .find(|r| r.feature == col.name)
            .ok_or_else(|| {
                IqaError::SchemaMismatch(format!("no quality record for column {:?}", col.name))
            })?;
        if !rec.kept {
            drop_list.push(col.name.clone());
            flags.insert(col.name.clone(), "below_threshold".to_string());
            continue;
        }
        if col.is_all_missing() {
            drop_list.push(col.name.clone());
            flags.insert(col.name.clone(), "untrainable".to_string());
            continue;
        }
        let spec = opts
            .imputers
            .iter()
            .find(|s| s.id == rec.chosen_imputer)
            .cloned()
            .or_else(|| (rec.chosen_imputer == fallback.id).then(|| fallback.clone()))
            .ok_or_else(|| {
                IqaError::invalid(format!("unknown imputer id {:?}", rec.chosen_imputer))
            })?
            .with_seed(derive_seed(opts.seed, &[FIT_STREAM, idx as u64]));
        let predictors = if spec.family.is_univariate() {
            Vec::new()
        } else {
            predictors_for(t, &col.name, opts.dependencies.as_ref())
        };
        fitted.push(imputers::fit(&spec, t, &col.name, &predictors)?);
    }
    Ok(PipelinePlan {
        schema_version: PIPELINE_SCHEMA_VERSION,
        columns: t.columns().iter().map(ColumnSchema::from).collect(),
        drop_list,
        imputers: fitted,
        dependencies: opts.dependencies.clone(),
        seed: opts.seed,
        config_hash,
        flags,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplyReport {
    pub filled: BTreeMap<String, usize>,
    pub knn_fallbacks: BTreeMap<String, usize>,
    /// Categories absent from the training dictionary, imputed as missing.
    pub unseen_categories: BTreeMap<String, usize>,
}

fn conform(plan: &PipelinePlan, t: &Table) -> Result<Table> {
    for s in &plan.columns {
        let c = t
            .column(&s.name)
            .map_err(|_| IqaError::SchemaMismatch(format!("column {:?} is missing", s.name)))?;
        if c.kind != s.kind {
            return Err(IqaError::SchemaMismatch(format!(
                "column {:?} is {:?}, the pipeline expects {:?}",
                s.name, c.kind, s.kind
            )));
        }
        if c.labels != s.labels {
            return Err(IqaError::SchemaMismatch(format!(
                "column {:?} uses a different category dictionary",
                s.name
            )));
        }
    }
    if t.n_cols() != plan.columns.len() {
        return Err(IqaError::SchemaMismatch(format!(
            "table has {} columns, the pipeline expects {}",
            t.n_cols(),
            plan.columns.len()
        )));
    }
    let names: Vec<&str> = plan.columns.iter().map(|c| c.name.as_str()).collect();
    t.select(&names)
}

pub fn apply_pipeline(plan: &PipelinePlan, t: &Table) -> Result<Table> {
    Ok(apply_pipeline_with_report(plan, t)?.0)
}

/// Imputes every kept feature and removes the drop list. All imputers read
/// the unmodified input, so their order does not matter.
pub fn apply_pipeline_with_report(plan: &PipelinePlan, t: &Table) -> Result<(Table, ApplyReport)> {
    let input = conform(plan, t)?;
    let mut out = input.clone();
    let mut report = ApplyReport::default();
    for imp in &plan.imputers {
        let (filled, r) = imp.transform_with_report(&input)?;
        report.filled.insert(imp.target.clone(), r.filled);
        if r.knn_fallbacks > 0 {
            report.knn_fallbacks.insert(imp.target.clone(), r.knn_fallbacks);
        }
        out.replace_column(filled.column(&imp.target)?.clone())?;
    }
    Ok((out.drop_columns(&plan.drop_list), report))
}

/// Encodes raw CSV cells with the pipeline's dictionaries. Unseen categories
/// become missing cells and are counted.
pub fn encode_raw(plan: &PipelinePlan, raw: &RawTable) -> Result<(Table, BTreeMap<String, usize>)> {
    let mut unseen = BTreeMap::new();
    let mut columns = Vec::with_capacity(plan.columns.len());
    for s in &plan.columns {
        let j = raw
            .names
            .iter()
            .position(|n| *n == s.name)
            .ok_or_else(|| IqaError::SchemaMismatch(format!("column {:?} is missing", s.name)))?;
        let cells = &raw.cells[j];
        let values: Vec<Option<f64>> = match &s.labels {
            Some(labels) => cells
                .iter()
                .map(|c| {
                    c.as_deref().and_then(|v| {
                        let code = labels.iter().position(|l| l == v);
                        if code.is_none() {
                            *unseen.entry(s.name.clone()).or_insert(0usize) += 1;
                        }
                        code.map(|i| i as f64)
                    })
                })
                .collect(),
            None => cells
                .iter()
                .enumerate()
                .map(|(row, c)| {
                    c.as_deref()
                        .map(|v| {
                            v.parse::<f64>().map_err(|_| IqaError::Parse {
                                row,
                                column: s.name.clone(),
                                value: v.to_string(),
                            })
                        })
                        .transpose()
                })
                .collect::<Result<_>>()?,
        };
        let mut c = Column::from_options(s.name.clone(), &values).with_kind(s.kind);
        c.labels = s.labels.clone();
        columns.push(c);
    }
    let t = if columns.is_empty() {
        Table::empty(raw.n_rows)
    } else {
        Table::new(columns)?
    };
    Ok((t, unseen))
}

pub fn serialize_pipeline(plan: &PipelinePlan) -> Result<Vec<u8>> {
    serde_json::to_vec_pretty(plan).map_err(|e| IqaError::CorruptModel(e.to_string()))
}

/// Parses a pipeline. A config hash differing from `expected_hash` is
/// returned as a warning, not an error.
pub fn deserialize_pipeline(
    bytes: &[u8],
    expected_hash: Option<&str>,
) -> Result<(PipelinePlan, Vec<String>)> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| IqaError::CorruptModel(e.to_string()))?;
    let version = value
        .get("schema_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| IqaError::CorruptModel("schema_version is missing".into()))?;
    if version != u64::from(PIPELINE_SCHEMA_VERSION) {
        return Err(IqaError::VersionMismatch {
            found: u32::try_from(version).unwrap_or(u32::MAX),
            expected: PIPELINE_SCHEMA_VERSION,
        });
    }
    let plan: PipelinePlan =
        serde_json::from_value(value).map_err(|e| IqaError::CorruptModel(e.to_string()))?;
    let mut warnings = Vec::new();
    if let Some(expected) = expected_hash {
        if plan.config_hash.as_deref() != Some(expected) {
            let w = format!(
                "pipeline was fitted with config {}, current config is {expected}",
                plan.config_hash.as_deref().unwrap_or("<none>")
            );
            log::warn!("{w}");
            warnings.push(w);
        }
    }
    Ok((plan, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::assess;
    use crate::estimators::EstimatorSpec;
    use crate::imputers::ImputerSpec;
    use crate::table::{infer_column_kinds, label_encode, read_raw_csv_from, CsvOptions};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn data(n: usize, seed: u64) -> Table {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let miss = |rng: &mut ChaCha8Rng, v: f64| (rng.gen::<f64>() >= 0.25).then_some(v);
        let y: Vec<Option<f64>> = x.iter().map(|&v| miss(&mut rng, 3.0 * v + 1.0)).collect();
        let b: Vec<Option<f64>> = x
            .iter()
            .map(|&v| miss(&mut rng, f64::from(u8::from(v > 0.5))))
            .collect();
        let noise: Vec<Option<f64>> = (0..n)
            .map(|_| {
                let v = rng.gen();
                miss(&mut rng, v)
            })
            .collect();
        let t = Table::new(vec![
            Column::from_values("x", x),
            Column::from_options("y", &y),
            Column::from_options("b", &b),
            Column::from_options("noise", &noise),
        ])
        .unwrap();
        infer_column_kinds(&t, &BTreeMap::new()).unwrap()
    }

    fn options(threshold: Option<f64>) -> AssessOptions {
        AssessOptions {
            imputers: vec![
                ImputerSpec::mean(),
                ImputerSpec::knn(5),
                ImputerSpec::iterative("iter_br", EstimatorSpec::ridge()),
                ImputerSpec::random(),
            ],
            threshold,
            ..AssessOptions::default()
        }
    }

    fn fitted(threshold: Option<f64>) -> (Table, PipelinePlan) {
        let t = data(150, 1);
        let opts = options(threshold);
        let recs = assess(&t, &opts).unwrap();
        let plan = fit_pipeline(&t, &recs, &opts, Some("abc".into())).unwrap();
        (t, plan)
    }

    #[test]
    fn own_table_has_no_missing_cells() {
        let (t, plan) = fitted(None);
        let out = apply_pipeline(&plan, &t).unwrap();
        assert_eq!(out.total_missing(), 0);
        assert_eq!(out.n_cols(), t.n_cols() - plan.drop_list.len());
        let b = out.column("b").unwrap();
        assert!(b.values.iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn dropped_feature_still_predicts() {
        let (t, plan) = fitted(Some(0.999));
        assert!(!plan.drop_list.is_empty());
        for imp in &plan.imputers {
            assert!(!plan.drop_list.contains(&imp.target));
        }
        let out = apply_pipeline(&plan, &t).unwrap();
        for d in &plan.drop_list {
            assert!(out.column(d).is_err());
        }
        let iter = plan.imputers.iter().find(|i| !i.predictors.is_empty());
        if let Some(i) = iter {
            assert_eq!(i.predictors.len(), t.n_cols() - 1);
        }
    }

    #[test]
    fn complete_table_only_drops() {
        let (t, plan) = fitted(Some(0.999));
        let complete = t.take_rows(
            &(0..t.n_rows())
                .filter(|&r| t.columns().iter().all(|c| !c.is_missing(r)))
                .collect::<Vec<_>>(),
        );
        let out = apply_pipeline(&plan, &complete).unwrap();
        assert_eq!(out, complete.drop_columns(&plan.drop_list));
    }

    #[test]
    fn round_trip() {
        let (_, plan) = fitted(None);
        let bytes = serialize_pipeline(&plan).unwrap();
        let (back, warnings) = deserialize_pipeline(&bytes, Some("abc")).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(back, plan);
        let held = data(60, 9);
        assert_eq!(apply_pipeline(&back, &held).unwrap(), apply_pipeline(&plan, &held).unwrap());
        let (_, warnings) = deserialize_pipeline(&bytes, Some("other")).unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn codec_errors() {
        let (_, plan) = fitted(None);
        let mut v = serde_json::to_value(&plan).unwrap();
        v["schema_version"] = 99.into();
        let bytes = serde_json::to_vec(&v).unwrap();
        assert!(matches!(
            deserialize_pipeline(&bytes, None),
            Err(IqaError::VersionMismatch { found: 99, .. })
        ));
        let mut v = serde_json::to_value(&plan).unwrap();
        v.as_object_mut().unwrap().remove("imputers");
        let bytes = serde_json::to_vec(&v).unwrap();
        assert!(matches!(deserialize_pipeline(&bytes, None), Err(IqaError::CorruptModel(_))));
        assert!(matches!(deserialize_pipeline(b"{", None), Err(IqaError::CorruptModel(_))));
    }

    #[test]
    fn schema_mismatch() {
        let (t, plan) = fitted(None);
        assert!(matches!(
            apply_pipeline(&plan, &t.drop_columns(&["y"])),
            Err(IqaError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn unseen_category_is_imputed_from_observed_codes() {
        let mut csv = String::from("c,x\n");
        for i in 0..60 {
            let c = ["red", "green", "blue"][i % 3];
            let c = if i % 7 == 0 { "?" } else { c };
            csv.push_str(&format!("{c},{}\n", i % 3));
        }
        let opts = CsvOptions::default();
        let raw = read_raw_csv_from(csv.as_bytes(), &opts).unwrap();
        let t = infer_column_kinds(&label_encode(&raw, &BTreeMap::new()).unwrap(), &BTreeMap::new())
            .unwrap();
        let aopts = options(None);
        let recs = assess(&t, &aopts).unwrap();
        let plan = fit_pipeline(&t, &recs, &aopts, None).unwrap();

        let new = read_raw_csv_from("c,x\npurple,1\nred,0\n".as_bytes(), &opts).unwrap();
        let (enc, unseen) = encode_raw(&plan, &new).unwrap();
        assert_eq!(unseen.get("c"), Some(&1));
        let out = apply_pipeline(&plan, &enc).unwrap();
        let c = out.column("c").unwrap();
        assert!(!c.is_missing(0));
        assert!(t.column("c").unwrap().distinct_observed().contains(&c.values[0]));
    }
}
