//! Detectability audit: how easily can a classifier tell imputed cells from
//! observed ones? Near 0.5 is good; near 1.0 means the imputations stand out.

use iqa::audit::{audit_all, audit_tables_csv, AuditOptions, Strategy};
use iqa::engine::AssessOptions;
use iqa::estimators::EstimatorSpec;
use iqa::imputers::ImputerSpec;
use iqa::table::{Column, Table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> iqa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 300;
    let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let cols = (0..4)
        .map(|j| {
            let w = 1.0 + j as f64 * 0.5;
            let v = z.iter().map(|z| w * z + rng.gen_range(-0.3..0.3)).collect();
            Column::from_values(format!("f{j}"), v)
        })
        .collect();
    let t = Table::new(cols)?;

    let iter_br = ImputerSpec::iterative("iter_br", EstimatorSpec::ridge());
    let strategies = [
        Strategy::uniform(ImputerSpec::mean()),
        Strategy::uniform(ImputerSpec::random()),
        Strategy::uniform(iter_br.clone()),
        Strategy::assessed(
            "iqa",
            AssessOptions {
                imputers: vec![ImputerSpec::mean(), ImputerSpec::random(), iter_br],
                ..AssessOptions::default()
            },
        ),
    ];
    let opts = AuditOptions {
        n_estimators: 50,
        ..AuditOptions::default()
    };
    let reports = audit_all(&t, &strategies, &[0.25, 0.5], &opts, 5)?;
    print!("{}", audit_tables_csv(&reports)?);
    Ok(())
}
