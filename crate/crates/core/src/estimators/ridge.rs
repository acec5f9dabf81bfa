use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_fit_input, check_predict_input, Design, Regressor};
use crate::error::{IqaError, Result};

/// L2-penalised linear regression, intercept left unpenalised.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub reg_strength: f64,
}

/// Solves `(XᵀX + reg·I) w = Xᵀy` on centred data.
pub fn ridge_fit(x: &Design, y: &[f64], reg: f64) -> Result<RidgeModel> {
    check_fit_input(x, y)?;
    if !(reg >= 0.0) {
        return Err(IqaError::invalid("reg_strength must be non-negative"));
    }
    let n = x.n_rows();
    let p = x.n_cols();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    if p == 0 {
        return Ok(RidgeModel {
            weights: Vec::new(),
            intercept: y_mean,
            reg_strength: reg,
        });
    }
    let x_means: Vec<f64> = (0..p)
        .map(|j| x.column(j).iter().sum::<f64>() / n as f64)
        .collect();
    let xc = DMatrix::from_fn(n, p, |r, j| x.get(r, j) - x_means[j]);
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
    let mut gram = xc.transpose() * &xc;
    for j in 0..p {
        gram[(j, j)] += reg;
    }
    let rhs = xc.transpose() * yc;
    let w = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        // Rank-deficient with reg = 0: minimum-norm least squares.
        None => gram
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| IqaError::degenerate(e.to_string()))?,
    };
    let weights: Vec<f64> = w.iter().copied().collect();
    let intercept = y_mean - weights.iter().zip(&x_means).map(|(w, m)| w * m).sum::<f64>();
    Ok(RidgeModel {
        weights,
        intercept,
        reg_strength: reg,
    })
}

impl Regressor for RidgeModel {
    fn predict(&self, x: &Design) -> Result<Vec<f64>> {
        check_predict_input(x, self.weights.len())?;
        Ok((0..x.n_rows())
            .map(|r| {
                self.intercept
                    + self
                        .weights
                        .iter()
                        .enumerate()
                        .map(|(j, w)| w * x.get(r, j))
                        .sum::<f64>()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_exact_line() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = xs.iter().map(|v| 3.0 * v).collect();
        let m = ridge_fit(&Design::new(vec![xs]).unwrap(), &y, 1e-10).unwrap();
        assert!((m.weights[0] - 3.0).abs() < 1e-6);
        assert!(m.intercept.abs() < 1e-6);
    }

    #[test]
    fn constant_target() {
        let x = Design::new(vec![vec![1., 5., 2., 7.], vec![0., 1., 0., 1.]]).unwrap();
        let m = ridge_fit(&x, &[4.0; 4], 1.0).unwrap();
        assert!(m.weights.iter().all(|w| w.abs() < 1e-12));
        assert_eq!(m.intercept, 4.0);
    }

    #[test]
    fn doubled_rows_with_doubled_penalty() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| r[0] - 2.0 * r[2] + rng.gen::<f64>()).collect();
        let doubled_rows: Vec<Vec<f64>> = rows.iter().chain(&rows).cloned().collect();
        let doubled_y: Vec<f64> = y.iter().chain(&y).copied().collect();
        let a = ridge_fit(&Design::from_rows(&rows).unwrap(), &y, 0.7).unwrap();
        let b = ridge_fit(&Design::from_rows(&doubled_rows).unwrap(), &doubled_y, 1.4).unwrap();
        for (wa, wb) in a.weights.iter().zip(&b.weights) {
            assert!((wa - wb).abs() < 1e-10);
        }
        assert!((a.intercept - b.intercept).abs() < 1e-10);
    }

    #[test]
    fn residuals_orthogonal_at_zero_penalty() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| r.iter().sum::<f64>() + rng.gen::<f64>()).collect();
        let x = Design::from_rows(&rows).unwrap();
        let m = ridge_fit(&x, &y, 0.0).unwrap();
        let pred = m.predict(&x).unwrap();
        let resid: Vec<f64> = y.iter().zip(&pred).map(|(a, b)| a - b).collect();
        for j in 0..4 {
            let dot: f64 = x.column(j).iter().zip(&resid).map(|(a, b)| a * b).sum();
            assert!(dot.abs() < 1e-8, "{dot}");
        }
        assert!(resid.iter().sum::<f64>().abs() < 1e-8);
    }

    #[test]
    fn zero_rows_is_degenerate() {
        let x = Design::with_rows(vec![], 0).unwrap();
        assert!(matches!(
            ridge_fit(&x, &[], 1.0),
            Err(IqaError::DegenerateInput(_))
        ));
    }
}
