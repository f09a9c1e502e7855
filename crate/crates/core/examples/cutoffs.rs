//! Cutoffs and mean noise lifetimes for the four noise families.
//!
//!     cargo run --release --example cutoffs

use anapt::noise::{self, CutoffQuery, Family, NoiseModel};

fn main() -> anapt::Result<()> {
    let n = 100_000;
    println!("n = {n}");
    println!("{:<12} {:>10} {:>12} {:>12} {:>12}", "family", "alpha", "cutoff", "generic", "mean life");
    for family in Family::ALL {
        let model = NoiseModel::standard(family);
        for alpha in [0.05, 0.001] {
            let q = CutoffQuery::new(alpha, n)?;
            println!(
                "{:<12} {:>10} {:>12.6} {:>12.6} {:>12.6}",
                family.name(),
                alpha,
                noise::cutoff(&model, q)?,
                noise::cutoff_generic(&model, q)?,
                noise::mean_lifetime(&model),
            );
        }
    }

    // cutoff grows slowly with n
    let g = NoiseModel::gaussian(1.0, 0.0)?;
    for n in [1_000, 10_000, 100_000, 1_000_000] {
        println!("gaussian sigma=1 n={n:>8}: {:.4}", noise::cutoff(&g, CutoffQuery::new(0.001, n)?)?);
    }
    Ok(())
}
