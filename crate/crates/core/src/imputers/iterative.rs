//! Chained-equations imputation.
//!
//! Missing cells start at a simple statistic, then each incomplete column is
//! regressed on all other columns in turn, most-missing first, until the
//! largest change of any imputed cell falls below `tolerance · σ` or
//! `max_iter` rounds have run.

use serde::{Deserialize, Serialize};

use super::{simple_statistic, ImputerFamily, ImputerSpec};
use crate::error::{IqaError, Result};
use crate::estimators::{Design, EstimatorSpec, FittedEstimator, Regressor};
use crate::seed::derive_seed;
use crate::table::Table;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    /// Index into [`IterativeState::columns`].
    pub column: usize,
    pub model: FittedEstimator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterativeState {
    /// Predictors first, target last.
    pub columns: Vec<String>,
    pub init_fill: Vec<f64>,
    /// Models in application order; the target's model comes last.
    pub chain: Vec<ChainStep>,
    /// Largest per-round change of an imputed cell, in column σ units.
    pub trace: Vec<f64>,
    pub converged: bool,
}

struct Working {
    values: Vec<Vec<f64>>,
    missing: Vec<Vec<bool>>,
}

impl Working {
    fn design_without(&self, skip: usize, rows: &[usize]) -> Result<Design> {
        let cols = (0..self.values.len())
            .filter(|&j| j != skip)
            .map(|j| rows.iter().map(|&r| self.values[j][r]).collect())
            .collect();
        Design::with_rows(cols, rows.len())
    }
}

fn training_error(column: &str, e: IqaError) -> IqaError {
    IqaError::ImputerTraining {
        column: column.to_string(),
        reason: e.to_string(),
    }
}

impl IterativeState {
    pub fn fit(
        spec: &ImputerSpec,
        train: &Table,
        target: &str,
        predictors: &[String],
    ) -> Result<Self> {
        let ImputerFamily::Iterative {
            init_strategy,
            max_iter,
            estimator,
            tolerance,
        } = &spec.family
        else {
            return Err(IqaError::invalid("not an iterative imputer spec"));
        };
        let columns: Vec<String> = predictors
            .iter()
            .cloned()
            .chain(std::iter::once(target.to_string()))
            .collect();
        let cols = columns
            .iter()
            .map(|c| train.column(c))
            .collect::<Result<Vec<_>>>()?;
        let init_fill: Vec<f64> = cols
            .iter()
            .map(|c| {
                let obs = c.observed();
                if obs.is_empty() {
                    0.0
                } else {
                    simple_statistic(&obs, *init_strategy)
                }
            })
            .collect();
        let mut work = Working {
            values: cols
                .iter()
                .zip(&init_fill)
                .map(|(c, &fill)| {
                    c.values
                        .iter()
                        .zip(&c.mask)
                        .map(|(&v, &m)| if m { fill } else { v })
                        .collect()
                })
                .collect(),
            missing: cols.iter().map(|c| c.mask.clone()).collect(),
        };
        let scales: Vec<f64> = cols
            .iter()
            .map(|c| {
                let obs = c.observed();
                let n = obs.len() as f64;
                let mean = obs.iter().sum::<f64>() / n;
                let sd = (obs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
                if sd.is_finite() && sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        let target_idx = columns.len() - 1;
        let mut order: Vec<usize> = (0..columns.len())
            .filter(|&j| cols[j].n_missing() > 0 && cols[j].n_observed() > 0)
            .collect();
        order.sort_by_key(|&j| std::cmp::Reverse(cols[j].n_missing()));

        let mut state = IterativeState {
            columns,
            init_fill,
            chain: Vec::new(),
            trace: Vec::new(),
            converged: false,
        };
        if *max_iter == 0 {
            return Ok(state);
        }

        let mut models: Vec<Option<FittedEstimator>> = vec![None; state.columns.len()];
        for round in 0..*max_iter {
            let mut max_delta: f64 = 0.0;
            for &j in &order {
                let model = fit_column(estimator, &work, j, spec.seed, round)
                    .map_err(|e| training_error(&state.columns[j], e))?;
                let miss: Vec<usize> = (0..work.missing[j].len())
                    .filter(|&r| work.missing[j][r])
                    .collect();
                let pred = model.predict(&work.design_without(j, &miss)?)?;
                for (&r, p) in miss.iter().zip(pred) {
                    let delta = (p - work.values[j][r]).abs() / scales[j];
                    max_delta = max_delta.max(delta);
                    work.values[j][r] = p;
                }
                models[j] = Some(model);
            }
            state.trace.push(max_delta);
            if max_delta < *tolerance {
                state.converged = true;
                break;
            }
        }
        if models[target_idx].is_none() {
            // Complete target in training: one model on the final values.
            let model = fit_column(estimator, &work, target_idx, spec.seed, *max_iter)
                .map_err(|e| training_error(target, e))?;
            models[target_idx] = Some(model);
        }
        state.chain = order
            .iter()
            .copied()
            .filter(|&j| j != target_idx)
            .chain(std::iter::once(target_idx))
            .filter_map(|j| models[j].take().map(|model| ChainStep { column: j, model }))
            .collect();
        Ok(state)
    }

    /// Values for the target at `rows` of `t`: mode-style initialisation
    /// followed by one pass of the stored chain.
    pub(crate) fn impute_target(&self, t: &Table, rows: &[usize]) -> Result<Vec<f64>> {
        let cols = self
            .columns
            .iter()
            .map(|c| t.column(c))
            .collect::<Result<Vec<_>>>()?;
        let mut work = Working {
            values: cols
                .iter()
                .zip(&self.init_fill)
                .map(|(c, &fill)| rows.iter().map(|&r| c.get(r).unwrap_or(fill)).collect())
                .collect(),
            missing: cols
                .iter()
                .map(|c| rows.iter().map(|&r| c.is_missing(r)).collect())
                .collect(),
        };
        let local: Vec<usize> = (0..rows.len()).collect();
        for step in &self.chain {
            let miss: Vec<usize> = local
                .iter()
                .copied()
                .filter(|&r| work.missing[step.column][r])
                .collect();
            if miss.is_empty() {
                continue;
            }
            let pred = step.model.predict(&work.design_without(step.column, &miss)?)?;
            for (&r, p) in miss.iter().zip(pred) {
                work.values[step.column][r] = p;
            }
        }
        Ok(work.values.pop().unwrap_or_default())
    }
}

fn fit_column(
    estimator: &EstimatorSpec,
    work: &Working,
    j: usize,
    seed: u64,
    round: usize,
) -> Result<FittedEstimator> {
    let obs: Vec<usize> = (0..work.missing[j].len())
        .filter(|&r| !work.missing[j][r])
        .collect();
    let x = work.design_without(j, &obs)?;
    let y: Vec<f64> = obs.iter().map(|&r| work.values[j][r]).collect();
    estimator.fit(&x, &y, derive_seed(seed, &[round as u64, j as u64]))
}
