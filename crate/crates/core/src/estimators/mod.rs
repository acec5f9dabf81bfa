//! Supervised learners backing iterative imputation, dependency graphs and
//! the detectability audit.

mod forest;
mod gbt;
mod importance;
mod ridge;
mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{IqaError, Result};

pub use forest::{forest_fit, ForestModel, ForestParams};
pub use gbt::{gbt_fit, log_loss, log_loss_gradient, sigmoid, GbtLoss, GbtModel, GbtParams};
pub use importance::permutation_importance;
pub use ridge::{ridge_fit, RidgeModel};
pub use tree::{Node, RegressionTree, TreeParams};

/// Column-major dense design matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    columns: Vec<Vec<f64>>,
    n_rows: usize,
}

impl Design {
    pub fn new(columns: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, Vec::len);
        Self::with_rows(columns, n_rows)
    }

    /// Needed when there are no columns but rows still matter.
    pub fn with_rows(columns: Vec<Vec<f64>>, n_rows: usize) -> Result<Self> {
        if columns.iter().any(|c| c.len() != n_rows) {
            return Err(IqaError::invalid("design columns differ in length"));
        }
        if columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(IqaError::invalid("design matrix holds non-finite values"));
        }
        Ok(Design { columns, n_rows })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let columns = (0..n_cols)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        Self::with_rows(columns, rows.len())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    pub fn take_rows(&self, rows: &[usize]) -> Design {
        Design {
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
            n_rows: rows.len(),
        }
    }

    pub(crate) fn replace_column(&mut self, j: usize, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.n_rows);
        self.columns[j] = values;
    }

    pub fn map_column(&self, j: usize, f: impl Fn(f64) -> f64) -> Design {
        let mut out = self.clone();
        out.columns[j] = self.columns[j].iter().map(|&v| f(v)).collect();
        out
    }
}

pub trait Regressor {
    fn predict(&self, x: &Design) -> Result<Vec<f64>>;
}

/// Declarative estimator configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum EstimatorSpec {
    Ridge {
        #[serde(default = "default_reg")]
        reg_strength: f64,
    },
    RandomForest {
        #[serde(default = "default_estimators")]
        n_estimators: usize,
        #[serde(default)]
        max_depth: Option<usize>,
        #[serde(default)]
        max_features: Option<usize>,
        #[serde(default = "default_true")]
        bootstrap: bool,
    },
    GradientBoosting {
        #[serde(default = "default_estimators")]
        n_estimators: usize,
        #[serde(default = "default_gbt_depth")]
        max_depth: usize,
        #[serde(default = "default_lr")]
        learning_rate: f64,
    },
}

fn default_reg() -> f64 {
    1.0
}
fn default_estimators() -> usize {
    100
}
fn default_true() -> bool {
    true
}
fn default_gbt_depth() -> usize {
    6
}
fn default_lr() -> f64 {
    0.1
}

impl EstimatorSpec {
    pub fn ridge() -> Self {
        EstimatorSpec::Ridge {
            reg_strength: default_reg(),
        }
    }

    pub fn random_forest(n_estimators: usize) -> Self {
        EstimatorSpec::RandomForest {
            n_estimators,
            max_depth: None,
            max_features: None,
            bootstrap: true,
        }
    }

    pub fn gradient_boosting() -> Self {
        EstimatorSpec::GradientBoosting {
            n_estimators: default_estimators(),
            max_depth: default_gbt_depth(),
            learning_rate: default_lr(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EstimatorSpec::Ridge { reg_strength } if !(reg_strength >= 0.0) => {
                Err(IqaError::invalid("reg_strength must be non-negative"))
            }
            EstimatorSpec::RandomForest { n_estimators: 0, .. }
            | EstimatorSpec::GradientBoosting { n_estimators: 0, .. } => {
                Err(IqaError::invalid("n_estimators must be positive"))
            }
            EstimatorSpec::GradientBoosting { learning_rate, .. } if !(learning_rate >= 0.0) => {
                Err(IqaError::invalid("learning_rate must be non-negative"))
            }
            _ => Ok(()),
        }
    }

    pub fn fit(&self, x: &Design, y: &[f64], seed: u64) -> Result<FittedEstimator> {
        self.validate()?;
        Ok(match *self {
            EstimatorSpec::Ridge { reg_strength } => {
                FittedEstimator::Ridge(ridge_fit(x, y, reg_strength)?)
            }
            EstimatorSpec::RandomForest {
                n_estimators,
                max_depth,
                max_features,
                bootstrap,
            } => FittedEstimator::Forest(forest_fit(
                x,
                y,
                &ForestParams {
                    n_estimators,
                    max_depth,
                    max_features,
                    bootstrap,
                    seed,
                },
            )?),
            EstimatorSpec::GradientBoosting {
                n_estimators,
                max_depth,
                learning_rate,
            } => FittedEstimator::Gbt(gbt_fit(
                x,
                y,
                &GbtParams {
                    n_estimators,
                    max_depth,
                    learning_rate,
                    loss: GbtLoss::Squared,
                    seed,
                },
            )?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FittedEstimator {
    Ridge(RidgeModel),
    Forest(ForestModel),
    Gbt(GbtModel),
}

impl Regressor for FittedEstimator {
    fn predict(&self, x: &Design) -> Result<Vec<f64>> {
        match self {
            FittedEstimator::Ridge(m) => m.predict(x),
            FittedEstimator::Forest(m) => m.predict(x),
            FittedEstimator::Gbt(m) => m.predict(x),
        }
    }
}

pub(crate) fn check_fit_input(x: &Design, y: &[f64]) -> Result<()> {
    if x.n_rows() == 0 {
        return Err(IqaError::degenerate("cannot fit on zero rows"));
    }
    if y.len() != x.n_rows() {
        return Err(IqaError::invalid("target length differs from design rows"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(IqaError::invalid("target holds non-finite values"));
    }
    Ok(())
}

pub(crate) fn check_predict_input(x: &Design, n_features: usize) -> Result<()> {
    if x.n_cols() != n_features {
        return Err(IqaError::invalid(format!(
            "model expects {n_features} features, got {}",
            x.n_cols()
        )));
    }
    Ok(())
}
