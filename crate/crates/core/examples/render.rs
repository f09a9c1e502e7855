//! Renders the diagram of a noisy signal with its estimated noise band
//! shaded, written to `diagram.svg` in the temp directory.
//!
//!     cargo run --release --example render

use anapt::persistence::sublevel_persistence;
use anapt::render::{diagram_svg, RenderOptions};
use anapt::signals::{self, SignalKind, SignalSpec};
use anapt::{anapt, Family, NoiseModel};

fn main() -> anapt::Result<()> {
    let clean = signals::generate(&SignalSpec::standard(SignalKind::Quasiperiodic, 10.0))?;
    let x = signals::add_noise(&clean, &NoiseModel::gaussian(1.0, 0.0)?, 5)?;
    let report = anapt(&x, Family::Gaussian, 0.001)?;
    let svg = diagram_svg(
        &sublevel_persistence(&x)?,
        Some(report.compensated_cutoff),
        &RenderOptions { title: Some(format!("cutoff {:.2}", report.compensated_cutoff)), ..Default::default() },
    );
    let path = std::env::temp_dir().join("diagram.svg");
    std::fs::write(&path, svg)?;
    println!("wrote {}", path.display());
    Ok(())
}
