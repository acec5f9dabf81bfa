//! End to end on the bundled heart disease table: missingness overview,
//! dependency graph, assessment and the chart.
//!
//! `cargo run -p iqa --release --example heart_disease -- [out_dir]`

use std::path::PathBuf;

use iqa::config::Config;
use iqa::depgraph::{build_dependency_graph, transitive_dependencies};
use iqa::engine::{assess, QualityReport};
use iqa::report::{emit_quality_svg, missingness_summary, summary_text};
use iqa::table::load_csv;

fn main() -> iqa::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let config = Config::from_path(dir.join("heart_disease_config.json"))?;
    let raw = load_csv(config.data.path.as_ref().expect("config names the data"), &config.csv_options())?;
    let table = raw.drop_columns(&config.data.exclude);

    let m = missingness_summary(&table);
    println!("{} rows, {:.1}% missing overall", m.n_rows, 100.0 * m.overall_fraction);
    for c in m.columns.iter().filter(|c| c.missing > 0) {
        println!("  {:<9} {:>5.1}%", c.feature, 100.0 * c.fraction);
    }

    let graph = build_dependency_graph(&table, &config.graph_params().expect("auto graph"))?;
    let deps = transitive_dependencies(&graph);
    let opts = config.assess_options(Some(deps));
    let report = QualityReport::new(assess(&table, &opts)?, &opts);
    println!();
    print!("{}", summary_text(&report.records, opts.threshold));

    if let Some(out) = std::env::args().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&out).map_err(|e| iqa::IqaError::io(&out, e))?;
        let svg = out.join("quality_chart.svg");
        std::fs::write(&svg, emit_quality_svg(&report.records, opts.threshold))
            .map_err(|e| iqa::IqaError::io(&svg, e))?;
        println!("chart written to {}", svg.display());
    }
    Ok(())
}
