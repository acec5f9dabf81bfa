//! Scorers and evaluation metrics.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{IqaError, Result};

/// True/predicted pairs plus the cells eligible for scoring.
#[derive(Clone, Debug, PartialEq)]
pub struct ScorePair<'a> {
    pub y_true: &'a [f64],
    pub y_pred: &'a [f64],
    pub valid: Option<&'a [bool]>,
}

impl<'a> ScorePair<'a> {
    /// Every cell is valid.
    pub fn new(y_true: &'a [f64], y_pred: &'a [f64]) -> Self {
        ScorePair {
            y_true,
            y_pred,
            valid: None,
        }
    }

    pub fn with_valid(y_true: &'a [f64], y_pred: &'a [f64], valid: &'a [bool]) -> Self {
        ScorePair {
            y_true,
            y_pred,
            valid: Some(valid),
        }
    }

    fn cells(&self) -> Result<Vec<(f64, f64)>> {
        if self.y_true.len() != self.y_pred.len()
            || self.valid.is_some_and(|v| v.len() != self.y_true.len())
        {
            return Err(IqaError::invalid("score arrays differ in length"));
        }
        let cells: Vec<(f64, f64)> = self
            .y_true
            .iter()
            .zip(self.y_pred)
            .enumerate()
            .filter(|(i, _)| self.valid.is_none_or(|v| v[*i]))
            .map(|(_, (&t, &p))| (t, p))
            .collect();
        if cells.is_empty() {
            return Err(IqaError::degenerate("no valid cells to score"));
        }
        Ok(cells)
    }
}

pub fn rmse(p: &ScorePair) -> Result<f64> {
    let cells = p.cells()?;
    let sse: f64 = cells.iter().map(|(t, y)| (t - y).powi(2)).sum();
    Ok((sse / cells.len() as f64).sqrt())
}

/// `1 - NRMSE` where NRMSE is the RMSE over the observed range of `y_true`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NrmseScore {
    pub score: f64,
    /// `y_true` was constant over the valid cells; the score is 1 for an exact
    /// match and 0 otherwise.
    pub constant_target: bool,
}

pub fn nrmse_score(p: &ScorePair) -> Result<NrmseScore> {
    let cells = p.cells()?;
    let (lo, hi) = cells
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(t, _)| {
            (lo.min(t), hi.max(t))
        });
    let err = rmse(p)?;
    if hi - lo <= 0.0 {
        return Ok(NrmseScore {
            score: if err == 0.0 { 1.0 } else { 0.0 },
            constant_target: true,
        });
    }
    Ok(NrmseScore {
        score: 1.0 - err / (hi - lo),
        constant_target: false,
    })
}

pub fn r2(p: &ScorePair) -> Result<f64> {
    let cells = p.cells()?;
    if cells.len() < 2 {
        return Err(IqaError::degenerate("R² needs at least two cells"));
    }
    let mean = cells.iter().map(|c| c.0).sum::<f64>() / cells.len() as f64;
    let ss_tot: f64 = cells.iter().map(|(t, _)| (t - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(IqaError::degenerate("R² undefined for constant target"));
    }
    let ss_res: f64 = cells.iter().map(|(t, y)| (t - y).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Mean per-class recall over the classes present in `y_true`. For two
/// classes this is `(TPR + TNR) / 2`.
pub fn balanced_accuracy(p: &ScorePair) -> Result<f64> {
    let cells = p.cells()?;
    let mut classes: Vec<f64> = cells.iter().map(|c| c.0).collect();
    classes.sort_by(f64::total_cmp);
    classes.dedup();
    if classes.len() < 2 {
        return Err(IqaError::degenerate(
            "balanced accuracy needs at least two classes in y_true",
        ));
    }
    let recall_sum: f64 = classes
        .iter()
        .map(|&c| {
            let (hits, total) = cells
                .iter()
                .filter(|(t, _)| *t == c)
                .fold((0usize, 0usize), |(h, n), &(_, y)| (h + usize::from(y == c), n + 1));
            hits as f64 / total as f64
        })
        .sum();
    Ok(recall_sum / classes.len() as f64)
}

/// Plain accuracy over valid cells.
pub fn accuracy(p: &ScorePair) -> Result<f64> {
    let cells = p.cells()?;
    let hits = cells.iter().filter(|(t, y)| t == y).count();
    Ok(hits as f64 / cells.len() as f64)
}

/// Area under the ROC curve through the Mann-Whitney rank statistic; tied
/// scores get half credit.
pub fn auroc(labels: &[bool], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(IqaError::invalid("labels and scores differ in length"));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(IqaError::degenerate("AUROC needs both classes"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Midranks, 1-based.
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mid;
        }
        i = j + 1;
    }
    let rank_sum: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(r, _)| r)
        .sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Mean and Student-t half-width of a confidence interval at `level`.
pub fn mean_ci(samples: &[f64], level: f64) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(IqaError::degenerate("confidence interval needs two samples"));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(IqaError::invalid(format!("confidence level {level}")));
    }
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let t = StudentsT::new(0.0, 1.0, k - 1.0)
        .map_err(|e| IqaError::invalid(e.to_string()))?
        .inverse_cdf(0.5 + level / 2.0);
    Ok((mean, t * var.sqrt() / k.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_cases() {
        assert_eq!(rmse(&ScorePair::new(&[1., 2.], &[1., 2.])).unwrap(), 0.0);
        assert_eq!(rmse(&ScorePair::new(&[0., 2.], &[2., 0.])).unwrap(), 2.0);
        assert_eq!(rmse(&ScorePair::new(&[3.], &[-1.5])).unwrap(), 4.5);
        let none = [false, false];
        assert!(rmse(&ScorePair::with_valid(&[0., 1.], &[0., 1.], &none)).is_err());
    }

    #[test]
    fn nrmse_cases() {
        let s = nrmse_score(&ScorePair::new(&[1., 2., 3.], &[1., 2., 3.])).unwrap();
        assert_eq!(s.score, 1.0);
        let s = nrmse_score(&ScorePair::new(&[0., 2.], &[2., 0.])).unwrap();
        assert_eq!(s.score, 0.0);
        let s = nrmse_score(&ScorePair::new(&[7., 7., 7.], &[7., 7., 7.])).unwrap();
        assert_eq!((s.score, s.constant_target), (1.0, true));
        let s = nrmse_score(&ScorePair::new(&[7., 7.], &[7., 6.])).unwrap();
        assert_eq!((s.score, s.constant_target), (0.0, true));
    }

    #[test]
    fn valid_mask_restricts_cells() {
        let valid = [true, false, true];
        let s = nrmse_score(&ScorePair::with_valid(&[0., 100., 2.], &[0., -50., 2.], &valid))
            .unwrap();
        assert_eq!(s.score, 1.0);
    }

    #[test]
    fn r2_cases() {
        let y = [1., 2., 4., 8.];
        assert_eq!(r2(&ScorePair::new(&y, &y)).unwrap(), 1.0);
        let m = [3.75; 4];
        assert_eq!(r2(&ScorePair::new(&y, &m)).unwrap(), 0.0);
        assert!(r2(&ScorePair::new(&[1., 1.], &[1., 2.])).is_err());
    }

    #[test]
    fn balanced_accuracy_cases() {
        let y = [0., 0., 1., 1.];
        assert_eq!(balanced_accuracy(&ScorePair::new(&y, &y)).unwrap(), 1.0);
        let inv = [1., 1., 0., 0.];
        assert_eq!(balanced_accuracy(&ScorePair::new(&y, &inv)).unwrap(), 0.0);
        let mut t = vec![0.0; 90];
        t.extend([1.0; 10]);
        let majority = vec![0.0; 100];
        assert_eq!(balanced_accuracy(&ScorePair::new(&t, &majority)).unwrap(), 0.5);
        assert!(balanced_accuracy(&ScorePair::new(&[1., 1.], &[1., 0.])).is_err());
    }

    #[test]
    fn auroc_cases() {
        assert_eq!(auroc(&[false, true], &[0.1, 0.9]).unwrap(), 1.0);
        assert_eq!(auroc(&[false, true, true, false], &[0.3; 4]).unwrap(), 0.5);
        assert!(auroc(&[true, true], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn ci_cases() {
        let (m, h) = mean_ci(&[0.7; 5], 0.95).unwrap();
        assert!((m - 0.7).abs() < 1e-15 && h == 0.0);
        // t(1, 0.975) = 12.706; sd of [0,1] = 0.7071; /sqrt(2) -> 0.5
        let (m, h) = mean_ci(&[0.0, 1.0], 0.95).unwrap();
        assert_eq!(m, 0.5);
        assert!((h - 12.706 * 0.5).abs() < 2e-3, "{h}");
        let x = [0.2, 0.5, 0.9, 0.4];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let (a, ha) = mean_ci(&x, 0.95).unwrap();
        let (b, hb) = mean_ci(&neg, 0.95).unwrap();
        assert!((a + b).abs() < 1e-15 && (ha - hb).abs() < 1e-15);
        assert!(mean_ci(&[1.0], 0.95).is_err());
    }
}
