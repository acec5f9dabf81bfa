//! Scores every feature of a synthetic table and prints the summary.
//!
//! `cargo run -p iqa --example assess_quality`

use iqa::engine::{assess, AssessOptions};
use iqa::estimators::EstimatorSpec;
use iqa::imputers::ImputerSpec;
use iqa::report::summary_text;
use iqa::table::{inject_mcar, Column, Table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> iqa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 400;
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
    // `y` is almost a copy of `x`; `noise` carries no signal at all.
    let y: Vec<f64> = x.iter().map(|v| 3.0 * v + rng.gen_range(-0.5..0.5)).collect();
    let noise: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let table = Table::new(vec![
        Column::from_values("x", x),
        Column::from_values("y", y),
        Column::from_values("noise", noise),
    ])?;
    let table = inject_mcar(&table, 0.3, 1, &["x"])?;

    let opts = AssessOptions {
        imputers: vec![
            ImputerSpec::mean(),
            ImputerSpec::random(),
            ImputerSpec::knn(5),
            ImputerSpec::iterative("iter_br", EstimatorSpec::ridge()),
        ],
        threshold: Some(0.8),
        ..AssessOptions::default()
    };
    let records = assess(&table, &opts)?;
    for r in &records {
        println!("{}:", r.feature);
        for o in &r.imputers {
            let verdict = o
                .verdict
                .as_ref()
                .map(|v| if v.rejected { "vetoed" } else { "ok" })
                .unwrap_or("skipped");
            println!("  {:<8} delta={:.3} {verdict}", o.imputer, o.delta_mean.unwrap_or(f64::NAN));
        }
    }
    println!();
    print!("{}", summary_text(&records, opts.threshold));
    Ok(())
}
