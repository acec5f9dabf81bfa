//! Gradient-boosted regression trees with squared or logistic loss.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_fit_input, check_predict_input, Design, RegressionTree, Regressor, TreeParams};
use crate::error::{IqaError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GbtLoss {
    Squared,
    Logistic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub loss: GbtLoss,
    pub seed: u64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            n_estimators: 100,
            max_depth: 6,
            learning_rate: 0.1,
            loss: GbtLoss::Squared,
            seed: 0,
        }
    }
}

/// Margin = `base_score + learning_rate · Σ tree(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub base_score: f64,
    pub trees: Vec<RegressionTree>,
    pub params: GbtParams,
    pub n_features: usize,
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Binary log-loss of a raw margin.
pub fn log_loss(y: f64, margin: f64) -> f64 {
    // log(1 + e^m) - y·m, written to stay finite for large |m|
    let softplus = if margin > 0.0 {
        margin + (-margin).exp().ln_1p()
    } else {
        margin.exp().ln_1p()
    };
    softplus - y * margin
}

/// Derivative of [`log_loss`] with respect to the margin.
pub fn log_loss_gradient(y: f64, margin: f64) -> f64 {
    sigmoid(margin) - y
}

const PROB_CLIP: f64 = 1e-6;

pub fn gbt_fit(x: &Design, y: &[f64], params: &GbtParams) -> Result<GbtModel> {
    check_fit_input(x, y)?;
    if params.n_estimators == 0 {
        return Err(IqaError::invalid("n_estimators must be positive"));
    }
    if !(params.learning_rate >= 0.0) {
        return Err(IqaError::invalid("learning_rate must be non-negative"));
    }
    let n = x.n_rows();
    let mean = y.iter().sum::<f64>() / n as f64;
    let base_score = match params.loss {
        GbtLoss::Squared => mean,
        GbtLoss::Logistic => {
            if y.iter().any(|&v| v != 0.0 && v != 1.0) {
                return Err(IqaError::invalid("logistic loss needs 0/1 targets"));
            }
            let p = mean.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
            (p / (1.0 - p)).ln()
        }
    };
    let tree_params = TreeParams {
        max_depth: Some(params.max_depth),
        ..TreeParams::default()
    };
    let sample: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut margin = vec![base_score; n];
    let mut trees = Vec::with_capacity(params.n_estimators);
    for _ in 0..params.n_estimators {
        let residual: Vec<f64> = match params.loss {
            GbtLoss::Squared => y.iter().zip(&margin).map(|(t, m)| t - m).collect(),
            GbtLoss::Logistic => y
                .iter()
                .zip(&margin)
                .map(|(&t, &m)| -log_loss_gradient(t, m))
                .collect(),
        };
        let tree = match params.loss {
            GbtLoss::Squared => {
                let leaf = |pos: &[usize]| {
                    pos.iter().map(|&p| residual[p]).sum::<f64>() / pos.len() as f64
                };
                RegressionTree::fit(x, &residual, &sample, &tree_params, &mut rng, &leaf)
            }
            GbtLoss::Logistic => {
                let hess: Vec<f64> = margin
                    .iter()
                    .map(|&m| {
                        let p = sigmoid(m);
                        p * (1.0 - p)
                    })
                    .collect();
                // One Newton step per leaf.
                let leaf = |pos: &[usize]| {
                    let g: f64 = pos.iter().map(|&p| residual[p]).sum();
                    let h: f64 = pos.iter().map(|&p| hess[p]).sum();
                    g / h.max(1e-12)
                };
                RegressionTree::fit(x, &residual, &sample, &tree_params, &mut rng, &leaf)
            }
        };
        for (r, m) in margin.iter_mut().enumerate() {
            *m += params.learning_rate * tree.predict_row(x, r);
        }
        trees.push(tree);
    }
    Ok(GbtModel {
        base_score,
        trees,
        params: params.clone(),
        n_features: x.n_cols(),
    })
}

impl GbtModel {
    pub fn predict_margin(&self, x: &Design) -> Result<Vec<f64>> {
        check_predict_input(x, self.n_features)?;
        let lr = self.params.learning_rate;
        Ok((0..x.n_rows())
            .map(|r| {
                self.base_score + lr * self.trees.iter().map(|t| t.predict_row(x, r)).sum::<f64>()
            })
            .collect())
    }

    /// Class-1 probabilities for a logistic model.
    pub fn predict_proba(&self, x: &Design) -> Result<Vec<f64>> {
        Ok(self.predict_margin(x)?.into_iter().map(sigmoid).collect())
    }
}

impl Regressor for GbtModel {
    fn predict(&self, x: &Design) -> Result<Vec<f64>> {
        match self.params.loss {
            GbtLoss::Squared => self.predict_margin(x),
            GbtLoss::Logistic => self.predict_proba(x),
        }
    }
}
