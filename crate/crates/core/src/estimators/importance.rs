use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Design, Regressor};
use crate::error::Result;
use crate::seed::derive_seed;

/// Mean drop in `scorer(y, ŷ)` when one column of the test set is shuffled.
///
/// Returns one value per feature; larger values mark more predictive
/// features. Each `(feature, repeat)` shuffle has its own derived seed.
pub fn permutation_importance<M, S>(
    model: &M,
    x_test: &Design,
    y_test: &[f64],
    scorer: S,
    seed: u64,
    n_repeats: usize,
) -> Result<Vec<f64>>
where
    M: Regressor + ?Sized,
    S: Fn(&[f64], &[f64]) -> Result<f64>,
{
    let baseline = scorer(y_test, &model.predict(x_test)?)?;
    let repeats = n_repeats.max(1);
    (0..x_test.n_cols())
        .map(|j| {
            let mut total = 0.0;
            for r in 0..repeats {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(derive_seed(seed, &[j as u64, r as u64]));
                let mut col = x_test.column(j).to_vec();
                col.shuffle(&mut rng);
                let mut permuted = x_test.clone();
                permuted.replace_column(j, col);
                total += scorer(y_test, &model.predict(&permuted)?)?;
            }
            Ok(baseline - total / repeats as f64)
        })
        .collect()
}
