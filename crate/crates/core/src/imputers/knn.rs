use serde::{Deserialize, Serialize};

use crate::error::{IqaError, Result};
use crate::table::Table;

/// Reference rows for nearest-neighbour imputation: every training row with
/// an observed target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnState {
    pub n_neighbors: usize,
    pub predictors: Vec<String>,
    /// Predictor values per reference row, `None` where missing.
    pub references: Vec<Vec<Option<f64>>>,
    pub targets: Vec<f64>,
    pub global_mean: f64,
}

/// Euclidean distance over mutually observed coordinates, scaled up by
/// `total / observed` to compensate for the skipped ones. `None` when the two
/// rows share no observed coordinate.
pub fn nan_euclidean(a: &[Option<f64>], b: &[Option<f64>]) -> Option<f64> {
    let total = a.len();
    let (mut sum, mut shared) = (0.0, 0usize);
    for (x, y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            sum += (x - y).powi(2);
            shared += 1;
        }
    }
    if shared == 0 {
        return None;
    }
    Some((total as f64 / shared as f64 * sum).sqrt())
}

/// Mean target of the `k` nearest references. Equal distances keep reference
/// order. The flag is set when no reference was comparable and the global
/// mean was used instead.
pub fn knn_impute(state: &KnnState, row: &[Option<f64>]) -> (f64, bool) {
    let mut dists: Vec<(f64, usize)> = state
        .references
        .iter()
        .enumerate()
        .filter_map(|(i, r)| nan_euclidean(row, r).map(|d| (d, i)))
        .collect();
    if dists.is_empty() {
        return (state.global_mean, true);
    }
    dists.sort_by(|a, b| a.0.total_cmp(&b.0));
    let k = state.n_neighbors.min(dists.len()).max(1);
    let mean = dists[..k].iter().map(|&(_, i)| state.targets[i]).sum::<f64>() / k as f64;
    (mean, false)
}

impl KnnState {
    pub fn fit(train: &Table, target: &str, predictors: &[String], n_neighbors: usize) -> Result<Self> {
        if n_neighbors == 0 {
            return Err(IqaError::invalid("n_neighbors must be at least 1"));
        }
        let y = train.column(target)?;
        let cols = predictors
            .iter()
            .map(|p| train.column(p))
            .collect::<Result<Vec<_>>>()?;
        let rows = y.observed_rows();
        let references = rows
            .iter()
            .map(|&r| cols.iter().map(|c| c.get(r)).collect())
            .collect();
        let targets: Vec<f64> = rows.iter().map(|&r| y.values[r]).collect();
        let global_mean = targets.iter().sum::<f64>() / targets.len().max(1) as f64;
        Ok(KnnState {
            n_neighbors,
            predictors: predictors.to_vec(),
            references,
            targets,
            global_mean,
        })
    }

    pub(crate) fn impute_rows(&self, t: &Table, rows: &[usize]) -> Result<(Vec<f64>, usize)> {
        let cols = self
            .predictors
            .iter()
            .map(|p| t.column(p))
            .collect::<Result<Vec<_>>>()?;
        let mut fallbacks = 0;
        let vals = rows
            .iter()
            .map(|&r| {
                let query: Vec<Option<f64>> = cols.iter().map(|c| c.get(r)).collect();
                let (v, fell_back) = knn_impute(self, &query);
                fallbacks += usize::from(fell_back);
                v
            })
            .collect();
        Ok((vals, fallbacks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(k: usize, refs: Vec<Vec<Option<f64>>>, targets: Vec<f64>) -> KnnState {
        let global_mean = targets.iter().sum::<f64>() / targets.len() as f64;
        KnnState {
            n_neighbors: k,
            predictors: vec![],
            references: refs,
            targets,
            global_mean,
        }
    }

    #[test]
    fn equidistant_neighbours_average() {
        let s = state(
            3,
            vec![vec![Some(1.0)], vec![Some(-1.0)], vec![Some(1.0)]],
            vec![1., 2., 3.],
        );
        assert_eq!(knn_impute(&s, &[Some(0.0)]), (2.0, false));
    }

    #[test]
    fn exact_match_wins_with_k1() {
        let s = state(
            1,
            vec![vec![Some(0.0), Some(4.0)], vec![Some(2.0), Some(2.0)]],
            vec![10., 20.],
        );
        assert_eq!(knn_impute(&s, &[Some(2.0), Some(2.0)]).0, 20.0);
    }

    #[test]
    fn distance_scaling_and_tie_order() {
        let query = [Some(0.0), Some(0.0)];
        let a = [Some(1.0), None];
        let b = [Some(1.0), Some(1.0)];
        let da = nan_euclidean(&query, &a).unwrap();
        let db = nan_euclidean(&query, &b).unwrap();
        assert_eq!(da, 2f64.sqrt());
        assert_eq!(db, 2f64.sqrt());
        let s = state(1, vec![a.to_vec(), b.to_vec()], vec![5., 9.]);
        assert_eq!(knn_impute(&s, &query).0, 5.0);
    }

    #[test]
    fn no_overlap_falls_back_to_mean() {
        let s = state(2, vec![vec![None], vec![Some(3.0)]], vec![1., 3.]);
        assert_eq!(knn_impute(&s, &[None]), (2.0, true));
        assert_eq!(knn_impute(&s, &[Some(3.0)]), (3.0, false));
    }
}
