#![allow(dead_code)]

use iqa::table::{inject_mcar, Column, ColumnKind, Table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

/// Eight continuous features driven by two latent factors plus noise.
pub fn linear_features(n: usize, seed: u64) -> Table {
    let mut r = rng(seed);
    let z1 = normals(&mut r, n);
    let z2 = normals(&mut r, n);
    let loadings = [
        (1.0, 0.0),
        (0.8, 0.3),
        (-0.6, 0.7),
        (0.0, 1.0),
        (0.5, -0.5),
        (1.2, 0.4),
        (-0.3, -0.9),
        (0.7, 0.7),
    ];
    let cols = loadings
        .iter()
        .enumerate()
        .map(|(j, &(a, b))| {
            let noise = normals(&mut r, n);
            let v = (0..n).map(|i| a * z1[i] + b * z2[i] + 0.3 * noise[i]).collect();
            Column::from_values(format!("f{j}"), v)
        })
        .collect();
    Table::new(cols).unwrap()
}

/// `y = 2x + noise · N(0, 1)` with `x ~ N(0, 1)`.
pub fn linear_pair(n: usize, noise: f64, seed: u64) -> Table {
    let mut r = rng(seed);
    let x = normals(&mut r, n);
    let e = normals(&mut r, n);
    let y = x.iter().zip(&e).map(|(x, e)| 2.0 * x + noise * e).collect();
    Table::new(vec![Column::from_values("x", x), Column::from_values("y", y)]).unwrap()
}

/// A continuous driver plus one binary, one discrete and one categorical
/// column that depend on it, with MCAR gaps at `rate`.
pub fn mixed_table(n: usize, rate: f64, seed: u64) -> Table {
    let mut r = rng(seed);
    let x: Vec<f64> = (0..n).map(|_| r.gen_range(-2.0..2.0)).collect();
    let mut jitter = |v: f64| v + r.gen_range(-1.0..1.0);
    let bin: Vec<f64> = x.iter().map(|&v| f64::from(u8::from(jitter(v) > 0.0))).collect();
    // Even codes only, so rounding to an unobserved odd code would show.
    let disc: Vec<f64> = x.iter().map(|&v| ((jitter(v) + 3.0).clamp(0.0, 5.99)).floor() * 2.0).collect();
    let cat: Vec<f64> = x.iter().map(|&v| ((jitter(v) + 3.0).clamp(0.0, 5.99) / 2.0).floor()).collect();
    let t = Table::new(vec![
        Column::from_values("x", x),
        Column::from_values("bin", bin).with_kind(ColumnKind::Binary),
        Column::from_values("disc", disc).with_kind(ColumnKind::Discrete),
        Column::from_values("cat", cat).with_kind(ColumnKind::Categorical),
    ])
    .unwrap();
    inject_mcar(&t, rate, seed ^ 0x5eed, &[]).unwrap()
}
