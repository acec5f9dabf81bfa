//! Fit on one batch, save the plan, load it back and fill a later batch.

use iqa::engine::{
    apply_pipeline, assess, deserialize_pipeline, fit_pipeline, serialize_pipeline, AssessOptions,
};
use iqa::estimators::EstimatorSpec;
use iqa::imputers::ImputerSpec;
use iqa::table::{inject_mcar, Column, ColumnKind, Table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn batch(n: usize, seed: u64) -> iqa::Result<Table> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let age: Vec<f64> = (0..n).map(|_| rng.gen_range(20.0..80.0)).collect();
    let bp: Vec<f64> = age.iter().map(|a| 90.0 + 0.8 * a + rng.gen_range(-8.0..8.0)).collect();
    let smoker: Vec<f64> = (0..n).map(|_| f64::from(u8::from(rng.gen_bool(0.3)))).collect();
    let t = Table::new(vec![
        Column::from_values("age", age),
        Column::from_values("bp", bp),
        Column::from_values("smoker", smoker).with_kind(ColumnKind::Binary),
    ])?;
    inject_mcar(&t, 0.2, seed, &[])
}

fn main() -> iqa::Result<()> {
    let train = batch(300, 3)?;
    let opts = AssessOptions {
        imputers: vec![
            ImputerSpec::mode(),
            ImputerSpec::knn(5),
            ImputerSpec::iterative("iter_br", EstimatorSpec::ridge()),
            ImputerSpec::random(),
        ],
        threshold: Some(0.5),
        seed: 3,
        ..AssessOptions::default()
    };
    let records = assess(&train, &opts)?;
    let plan = fit_pipeline(&train, &records, &opts, None)?;

    let path = std::env::temp_dir().join("iqa_example_pipeline.json");
    std::fs::write(&path, serialize_pipeline(&plan)?).map_err(|e| iqa::IqaError::io(&path, e))?;
    let bytes = std::fs::read(&path).map_err(|e| iqa::IqaError::io(&path, e))?;
    let (restored, warnings) = deserialize_pipeline(&bytes, None)?;
    assert!(warnings.is_empty());

    let later = batch(8, 4)?;
    let filled = apply_pipeline(&restored, &later)?;
    println!("dropped: {:?}", restored.drop_list);
    for (f, imp) in restored.imputers.iter().map(|i| (&i.target, &i.spec.id)) {
        println!("{f} <- {imp}");
    }
    let mut out = Vec::new();
    println!("before:");
    later.write_csv(&mut out)?;
    println!("{}", String::from_utf8_lossy(&out));
    out.clear();
    println!("after:");
    filled.write_csv(&mut out)?;
    println!("{}", String::from_utf8_lossy(&out));
    Ok(())
}
