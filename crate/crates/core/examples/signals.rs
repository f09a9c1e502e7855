//! Writes a noisy test signal as `time,value` CSV to stdout.
//!
//!     cargo run --example signals -- wood1 0.5 > wood1.csv

use anapt::signals::{self, SignalKind, SignalSpec};
use anapt::NoiseModel;
use clap::ValueEnum;

fn main() -> anapt::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind = args
        .next()
        .and_then(|s| SignalKind::from_str(&s, true).ok())
        .unwrap_or(SignalKind::Sinusoid);
    let sigma: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.2);

    let clean = signals::generate(&SignalSpec::standard(kind, 1.0))?;
    let x = signals::add_noise(&clean, &NoiseModel::gaussian(sigma, 0.0)?, 11)?;
    eprintln!("{kind:?}: {} samples at {} Hz from t={}", x.len(), x.sample_rate(), x.t0());
    anapt::io::write_series(std::io::stdout().lock(), &x)
}
