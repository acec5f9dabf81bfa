//! Learns which features predict which, then flattens the graph into the
//! per-feature predictor lists used to restrict imputers.

use iqa::depgraph::{build_dependency_graph, transitive_dependencies, GraphParams};
use iqa::table::{Column, Table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> iqa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 300;
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = a.iter().map(|v| 2.0 * v + rng.gen_range(-0.1..0.1)).collect();
    let c: Vec<f64> = b.iter().map(|v| v * v + rng.gen_range(-0.1..0.1)).collect();
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let t = Table::new(vec![
        Column::from_values("a", a),
        Column::from_values("b", b),
        Column::from_values("c", c),
        Column::from_values("d", d),
    ])?;

    let graph = build_dependency_graph(&t, &GraphParams { seed: 2, ..GraphParams::default() })?;
    for e in &graph.edges {
        println!("{} -> {}  importance {:.3}", e.from, e.to, e.weight);
    }
    let dict = transitive_dependencies(&graph);
    println!("{}", serde_json::to_string_pretty(&dict).expect("serialisable"));
    Ok(())
}
