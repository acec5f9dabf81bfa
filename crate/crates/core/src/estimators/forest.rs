use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::mean_leaf;
use super::{check_fit_input, check_predict_input, Design, RegressionTree, Regressor, TreeParams};
use crate::error::{IqaError, Result};
use crate::seed::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    /// Features drawn per split; defaults to `ceil(p / 3)`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_estimators: 100,
            max_depth: None,
            max_features: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<RegressionTree>,
    pub params: ForestParams,
    pub n_features: usize,
}

pub fn forest_fit(x: &Design, y: &[f64], params: &ForestParams) -> Result<ForestModel> {
    check_fit_input(x, y)?;
    if params.n_estimators == 0 {
        return Err(IqaError::invalid("n_estimators must be positive"));
    }
    let p = x.n_cols();
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        max_features: Some(params.max_features.unwrap_or(p.div_ceil(3)).max(1)),
        ..TreeParams::default()
    };
    let n = x.n_rows();
    let trees = (0..params.n_estimators)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, &[t as u64]));
            let sample: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let ys: Vec<f64> = sample.iter().map(|&r| y[r]).collect();
            let leaf = mean_leaf(&ys);
            RegressionTree::fit(x, y, &sample, &tree_params, &mut rng, &leaf)
        })
        .collect();
    Ok(ForestModel {
        trees,
        params: params.clone(),
        n_features: p,
    })
}

impl Regressor for ForestModel {
    fn predict(&self, x: &Design) -> Result<Vec<f64>> {
        check_predict_input(x, self.n_features)?;
        let k = self.trees.len() as f64;
        Ok((0..x.n_rows())
            .map(|r| self.trees.iter().map(|t| t.predict_row(x, r)).sum::<f64>() / k)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{r2, ScorePair};

    #[test]
    fn step_function_recovered() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64 / 10.0).collect();
        let y: Vec<f64> = xs.iter().map(|&v| if v < 4.0 { -1.0 } else { 2.0 }).collect();
        let x = Design::new(vec![xs]).unwrap();
        let m = forest_fit(
            &x,
            &y,
            &ForestParams {
                n_estimators: 20,
                max_depth: Some(1),
                ..ForestParams::default()
            },
        )
        .unwrap();
        let pred = m.predict(&x).unwrap();
        assert!(r2(&ScorePair::new(&y, &pred)).unwrap() > 0.9);
    }

    #[test]
    fn single_unbootstrapped_tree_memorises() {
        let x = Design::new(vec![
            vec![0.1, 0.7, 0.3, 0.9, 0.5, 0.2],
            vec![5.0, 1.0, 4.0, 2.0, 3.0, 0.0],
            vec![1.0, 1.0, 0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let y = [3.0, -1.0, 2.5, 7.0, 0.0, 1.0];
        let m = forest_fit(
            &x,
            &y,
            &ForestParams {
                n_estimators: 1,
                bootstrap: false,
                ..ForestParams::default()
            },
        )
        .unwrap();
        assert_eq!(m.predict(&x).unwrap(), y.to_vec());
    }

    #[test]
    fn deterministic_per_seed() {
        let x = Design::new(vec![
            (0..30).map(|i| (i * 7 % 11) as f64).collect(),
            (0..30).map(|i| (i * 3 % 5) as f64).collect(),
        ])
        .unwrap();
        let y: Vec<f64> = (0..30).map(|i| (i % 4) as f64).collect();
        let p = ForestParams {
            n_estimators: 5,
            seed: 9,
            ..ForestParams::default()
        };
        assert_eq!(forest_fit(&x, &y, &p).unwrap(), forest_fit(&x, &y, &p).unwrap());
    }

    #[test]
    fn empty_is_degenerate() {
        let x = Design::with_rows(vec![vec![]], 0).unwrap();
        assert!(forest_fit(&x, &[], &ForestParams::default()).is_err());
    }
}
