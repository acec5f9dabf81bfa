//! Renders the stacked quality chart for hand-made records.
//!
//! `cargo run -p iqa --example quality_chart > chart.svg`

use iqa::engine::{quality_score, QualityRecord};
use iqa::report::emit_quality_svg;
use iqa::table::ColumnKind;

fn record(feature: &str, mu: f64, delta: f64, imputer: &str, fallback: bool) -> QualityRecord {
    QualityRecord {
        feature: feature.into(),
        kind: ColumnKind::Continuous,
        completeness: mu,
        imputers: vec![],
        chosen_imputer: imputer.into(),
        delta,
        delta_std: 0.03,
        omega: quality_score(mu, delta).expect("inputs in range"),
        kept: true,
        fallback_used: fallback,
        flags: vec![],
    }
}

fn main() {
    let records = [
        record("age", 1.0, 0.0, "mean", false),
        record("chol", 0.967, 0.62, "iter_rf", false),
        record("slope", 0.664, 0.48, "knn10", false),
        record("thal", 0.472, 0.55, "iter_xgb", false),
        record("ca", 0.336, 0.21, "random", true),
    ];
    print!("{}", emit_quality_svg(&records, Some(0.7)));
}
