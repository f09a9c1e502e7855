//! Full estimate on a noisy quasiperiodic signal: noise level from the
//! median lifetime, raw cutoff, compensation, and the resulting labels.
//!
//!     cargo run --release --example anapt_pipeline [seed]

use anapt::signals::{self, SignalKind, SignalSpec};
use anapt::{anapt, Family, NoiseModel};

fn main() -> anapt::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let clean = signals::generate(&SignalSpec::standard(SignalKind::Quasiperiodic, 10.0))?;
    let x = signals::add_noise(&clean, &NoiseModel::gaussian(1.0, 0.0)?, seed)?;

    let r = anapt(&x, Family::Gaussian, 0.001)?;
    println!("samples          {}", r.n);
    println!("median lifetime  {:.4}", r.median_lifetime);
    println!("raw sigma        {:.4}   cutoff {:.4}", r.raw_param, r.raw_cutoff);
    println!("pairs above      {}", r.pairs_above_raw_cutoff);
    println!("delta            {:.4}   R {:.4}", r.delta, r.r);
    println!("sigma*           {:.4}   cutoff* {:.4}", r.compensated_param, r.compensated_cutoff);
    println!("signal pairs     {} of {}", r.signal_pairs.len(), r.total_pairs());
    if !r.reliable {
        println!("warning: most pairs exceed the raw cutoff, estimate unreliable");
    }
    for p in &r.signal_pairs {
        println!("  t={:6.2} .. {:6.2}  life {:.3}", x.time(p.birth_index), x.time(p.death_index), p.lifetime());
    }
    Ok(())
}
