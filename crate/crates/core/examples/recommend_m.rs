//! How many multiple imputations are enough?

use iqa::engine::{efficiency, recommend_imputations};

fn main() -> iqa::Result<()> {
    println!("{:>6} {:>8} {:>8} {:>8}", "gamma", "m=5", "m=10", "m=20");
    for gamma in [0.1, 0.3, 0.5, 0.7, 0.9] {
        println!(
            "{gamma:>6} {:>8.4} {:>8.4} {:>8.4}",
            efficiency(gamma, 5)?,
            efficiency(gamma, 10)?,
            efficiency(gamma, 20)?
        );
    }
    println!();
    for target in [0.9, 0.95, 0.99] {
        println!("gamma 0.5, efficiency {target}: m = {}", recommend_imputations(0.5, target)?);
    }
    Ok(())
}
