//! Monte Carlo estimates of rho and of the compensation constants, at a
//! reduced size so it finishes in a few seconds.
//!
//!     cargo run --release --example calibration [family]

use anapt::calibration::{self, CompensationProtocol};
use anapt::estimator::{default_rho, CompensationConstants};
use anapt::Family;

fn main() -> anapt::Result<()> {
    let family: Family = std::env::args().nth(1).map_or(Ok(Family::Gaussian), |s| s.parse())?;

    let rho = calibration::estimate_rho(family, 100_000, 5, 1)?;
    println!("rho   {:.4} +- {:.4}   (built-in {})", rho.value, rho.sd, default_rho(family));

    let (mc, exact) = calibration::validate_mean_lifetime(family, 200_000, 2)?;
    println!("mean lifetime  sampled {mc:.4}  quadrature {exact:.4}");

    let protocol = CompensationProtocol::standard(40);
    let fit = calibration::fit_compensation_constants(family, &protocol, 3)?;
    let d = CompensationConstants::defaults(family);
    println!(
        "c1 {:.3}  c2 {:.3}   (built-in {} {})  after {} iterations",
        fit.constants.c1, fit.constants.c2, d.c1, d.c2, fit.iterations
    );
    for (template, rms) in &fit.relative_rms {
        println!("  {template:?}: relative rms {:.2}%", 100.0 * rms);
    }
    Ok(())
}
