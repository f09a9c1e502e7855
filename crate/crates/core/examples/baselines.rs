//! Noisy Lorenz x-coordinate: the estimator against persistent entropy,
//! the residual bootstrap, and two residual-based noise estimates.
//!
//!     cargo run --release --example baselines

use anapt::baselines::{self, BootstrapConfig, FilterCutoff, Label, DEFAULT_FILTER_ORDER};
use anapt::persistence::sublevel_persistence;
use anapt::signals::{self, lorenz_reference};
use anapt::{anapt, Family, NoiseModel};

fn main() -> anapt::Result<()> {
    let clean = lorenz_reference()?;
    let sigma = signals::sigma_from_snr(&clean, 23.0)?;
    let x = signals::add_noise(&clean, &NoiseModel::gaussian(sigma, 0.0)?, 1)?;
    println!("Lorenz x, 23 dB, sigma {sigma:.3}");

    let r = anapt(&x, Family::Gaussian, 0.001)?;
    println!("estimator   cutoff {:.3}  ({} signal pairs)", r.compensated_cutoff, r.signal_pairs.len());

    let labels = baselines::persistent_entropy_separation(&sublevel_persistence(&x)?)?;
    let n_signal = labels.iter().filter(|&&l| l == Label::Signal).count();
    println!("entropy     {n_signal} signal pairs");

    let boot = baselines::bootstrap_cutoff(&x, &BootstrapConfig { resamples: 200, seed: 1, ..Default::default() })?;
    println!("bootstrap   cutoff {:.3}  (low-pass at {:.1} Hz)", boot.threshold, boot.filter_cutoff_hz);

    println!("\nnoise estimates relative to the truth");
    println!("{:>6} {:>10} {:>10} {:>10}", "SNR", "spline", "estimator", "low-pass");
    for snr in [20.0, 30.0, 40.0] {
        let s = signals::sigma_from_snr(&clean, snr)?;
        let x = signals::add_noise(&clean, &NoiseModel::gaussian(s, 0.0)?, 2)?;
        println!(
            "{:>6} {:>10.3} {:>10.3} {:>10.3}",
            snr,
            baselines::spline_residual_sigma(&x)? / s,
            anapt(&x, Family::Gaussian, 0.001)?.compensated_param / s,
            baselines::lowpass_residual_sigma(&x, FilterCutoff::NoiseFloor, DEFAULT_FILTER_ORDER)? / s,
        );
    }
    Ok(())
}
