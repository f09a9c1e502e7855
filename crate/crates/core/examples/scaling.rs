//! Wall time of the persistence diagram of Gaussian noise against length.
//!
//!     cargo run --release --example scaling

use std::time::Instant;

use anapt::noise::{sample, NoiseModel};
use anapt::persistence::sublevel_persistence;

fn main() -> anapt::Result<()> {
    let model = NoiseModel::gaussian(1.0, 0.0)?;
    let mut previous: Option<f64> = None;
    println!("{:>9} {:>10} {:>8} {:>7}", "n", "median ms", "pairs", "ratio");
    for k in 14..=20 {
        let x = sample(&model, 1 << k, k as u64)?;
        let mut times = Vec::new();
        let mut pairs = 0;
        for _ in 0..5 {
            let t = Instant::now();
            pairs = sublevel_persistence(&x)?.len();
            times.push(t.elapsed().as_secs_f64());
        }
        times.sort_by(f64::total_cmp);
        let median = times[2];
        let ratio = previous.map_or(String::new(), |p| format!("{:.2}", median / p));
        println!("{:>9} {:>10.3} {:>8} {:>7}", 1 << k, 1e3 * median, pairs, ratio);
        previous = Some(median);
    }
    Ok(())
}
