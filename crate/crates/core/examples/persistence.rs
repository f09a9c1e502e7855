//! Diagram of a short series, checked against the union-find oracle, and
//! the bottleneck distance to a perturbed copy.
//!
//!     cargo run --example persistence

use anapt::persistence::{bottleneck_distance, sublevel_persistence, sublevel_persistence_bruteforce};
use anapt::TimeSeries;

fn main() -> anapt::Result<()> {
    let x = TimeSeries::from_values(vec![3.0, 1.0, 4.0, 1.5, 5.0, 0.0, 2.6, 2.0, 6.0])?;
    let dgm = sublevel_persistence(&x)?;
    println!("{:>8} {:>8} {:>8}  indices", "birth", "death", "life");
    for p in dgm.pairs() {
        println!("{:8.3} {:8.3} {:8.3}  {} -> {}", p.birth, p.death, p.lifetime(), p.birth_index, p.death_index);
    }
    println!("essential class born at {}", dgm.essential_birth());

    let oracle = sublevel_persistence_bruteforce(&x)?;
    assert_eq!(dgm.sorted_points(), oracle.sorted_points());
    println!("matches the brute-force filtration");

    let y = x.map(|v| v + 0.1 * (v * 7.0).sin())?;
    let d = bottleneck_distance(&dgm, &sublevel_persistence(&y)?);
    let sup = x.values().iter().zip(y.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("bottleneck distance {d:.4} <= sup-norm {sup:.4}");
    Ok(())
}
