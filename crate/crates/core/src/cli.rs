//! Command-line front end.
//!
//! Every subcommand writes its result to stdout (or `--output`) and exits 0.
//! Failures print `{"error": <kind>, "message": <text>}` on stderr and exit
//! with status 1; malformed flags exit with status 2.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::baselines::{self, BootstrapConfig, FilterCutoff, Label, DEFAULT_FILTER_ORDER};
use crate::calibration::{self, CalibrationTables, CompensationProtocol, ConstantsEstimate};
use crate::error::{Error, Result};
use crate::estimator::{self, AnaptConfig};
use crate::io as csvio;
use crate::noise::{self, CutoffQuery, Family, NoiseModel, DEFAULT_ALPHA};
use crate::persistence::sublevel_persistence;
use crate::render::{self, RenderOptions};
use crate::series::TimeSeries;
use crate::signals::{self, SignalKind, SignalSpec};

#[derive(Debug, Parser)]
#[command(name = "anapt", version, about = "Persistence diagrams of time series and noise cutoffs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Persistence diagram of a series (CSV in, diagram CSV out).
    Persist(PersistArgs),
    /// Estimate the noise level and the compensated cutoff of a series.
    Analyze(AnalyzeArgs),
    /// Cutoff for a known noise model.
    Cutoff(CutoffArgs),
    /// Monte Carlo calibration of the estimator constants.
    #[command(subcommand)]
    Calibrate(CalibrateCommand),
    /// Comparison methods.
    #[command(subcommand)]
    Baseline(BaselineCommand),
    /// Generate a signal, optionally with additive noise, as `time,value` CSV.
    Simulate(SimulateArgs),
    /// SVG scatter plot of a diagram CSV.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct SeriesInput {
    /// CSV with one column (value) or two (time,value); header optional.
    pub input: PathBuf,
    /// Sample rate in Hz for single-column input.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
}

impl SeriesInput {
    fn load(&self) -> Result<TimeSeries> {
        csvio::read_series_file(&self.input, self.rate)
    }
}

#[derive(Debug, Args)]
pub struct PersistArgs {
    #[command(flatten)]
    pub series: SeriesInput,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub series: SeriesInput,
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Treat the input as a diagram CSV written by `persist`.
    #[arg(long, requires = "samples")]
    pub diagram: bool,
    /// Length of the series the diagram was computed from.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Calibration JSON overriding the built-in constants.
    #[arg(long, env = "ANAPT_CALIBRATION")]
    pub calibration: Option<PathBuf>,
    /// Where to write the JSON report (stdout by default).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Where to write the labeled diagram CSV.
    #[arg(long)]
    pub labeled: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CutoffArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// sigma, Delta, sigma or lambda, depending on the family.
    #[arg(long)]
    pub param: f64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Number of samples of the series.
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Subcommand)]
pub enum CalibrateCommand {
    /// Mean-to-median lifetime ratio of pure noise.
    Rho(RhoArgs),
    /// Compensation constants from template sweeps.
    Compensation(CompensationArgs),
}

#[derive(Debug, Args)]
pub struct TablesUpdate {
    /// Calibration JSON to update in place (created from the built-in
    /// tables if missing).
    #[arg(long)]
    pub update: Option<PathBuf>,
}

impl TablesUpdate {
    fn apply(&self, f: impl FnOnce(&mut CalibrationTables)) -> Result<()> {
        let Some(path) = &self.update else { return Ok(()) };
        let mut tables = match CalibrationTables::load(path) {
            Err(Error::FileNotFound(_)) => CalibrationTables::default(),
            other => other?,
        };
        f(&mut tables);
        tables.validate()?;
        tables.save(path)
    }
}

#[derive(Debug, Args)]
pub struct RhoArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tables: TablesUpdate,
}

#[derive(Debug, Args)]
pub struct CompensationArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 100)]
    pub trials_per_delta: usize,
    /// Independent sweeps to average over.
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tables: TablesUpdate,
}

#[derive(Debug, Subcommand)]
pub enum BaselineCommand {
    /// Persistent-entropy labeling of the diagram.
    Entropy(EntropyArgs),
    /// Residual bootstrap of the bottleneck distance.
    Bootstrap(BootstrapArgs),
    /// Noise level by low-pass filtering, spline fitting and the estimator.
    Sigma(SigmaArgs),
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub series: SeriesInput,
    #[arg(long)]
    pub labeled: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Low-pass cutoff in Hz (noise-floor rule if omitted).
    #[arg(long)]
    pub filter_cutoff: Option<f64>,
    /// Use twice the dominant frequency as the low-pass cutoff.
    #[arg(long, conflicts_with = "filter_cutoff")]
    pub twice_dominant: bool,
    #[arg(long, default_value_t = DEFAULT_FILTER_ORDER)]
    pub filter_order: u32,
}

impl FilterArgs {
    fn cutoff(&self) -> FilterCutoff {
        match (self.filter_cutoff, self.twice_dominant) {
            (Some(hz), _) => FilterCutoff::Fixed(hz),
            (None, true) => FilterCutoff::TwiceDominant,
            (None, false) => FilterCutoff::NoiseFloor,
        }
    }
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub series: SeriesInput,
    #[arg(long, default_value_t = 1000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0.95)]
    pub percentile: f64,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include every bootstrap distance in the report.
    #[arg(long)]
    pub distances: bool,
}

#[derive(Debug, Args)]
pub struct SigmaArgs {
    #[command(flatten)]
    pub series: SeriesInput,
    #[arg(long, value_enum, default_value_t = Family::Gaussian)]
    pub family: Family,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[arg(long, env = "ANAPT_CALIBRATION")]
    pub calibration: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Signal to sample; pure noise of `--n` samples if omitted.
    #[arg(long, value_enum)]
    pub signal: Option<SignalKind>,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Domain start (the signal's standard domain if omitted).
    #[arg(long)]
    pub t_start: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    /// Angular frequency of the sinusoid.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Number of samples of pure noise.
    #[arg(long, conflicts_with = "signal")]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub noise: Option<Family>,
    /// Noise parameter (sigma, Delta, sigma or lambda).
    #[arg(long, conflicts_with = "snr_db")]
    pub param: Option<f64>,
    /// Gaussian noise level relative to the signal rms.
    #[arg(long)]
    pub snr_db: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Diagram CSV written by `persist`.
    pub diagram: PathBuf,
    /// Shade lifetimes at or below this value.
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long, default_value_t = 480.0)]
    pub size: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn anapt_config(family: Family, alpha: f64, calibration: Option<&Path>) -> Result<AnaptConfig> {
    check_alpha(alpha)?;
    let mut config = AnaptConfig::new(family).with_alpha(alpha);
    if let Some(path) = calibration {
        let tables = CalibrationTables::load(path)?;
        config.rho = tables.rho(family);
        config.constants = tables.compensation(family);
    }
    Ok(config)
}

fn labels_for(dgm: &crate::persistence::PersistenceDiagram, cutoff: f64) -> Vec<Label> {
    dgm.pairs()
        .iter()
        .map(|p| if p.lifetime() > cutoff { Label::Signal } else { Label::Noise })
        .collect()
}

fn persist(a: &PersistArgs) -> Result<()> {
    let dgm = sublevel_persistence(&a.series.load()?)?;
    let mut out = sink(a.output.as_deref())?;
    csvio::write_diagram(&mut out, &dgm)?;
    out.flush()?;
    Ok(())
}

fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let config = anapt_config(a.family, a.alpha, a.calibration.as_deref())?;
    let dgm = if a.diagram {
        csvio::read_diagram_file(&a.series.input, a.samples.unwrap_or_default())?
    } else {
        sublevel_persistence(&a.series.load()?)?
    };
    let report = estimator::analyze_diagram(&dgm, &config)?;
    if let Some(path) = &a.labeled {
        let mut out = BufWriter::new(File::create(path)?);
        csvio::write_labeled_diagram(&mut out, &dgm, &labels_for(&dgm, report.compensated_cutoff))?;
        out.flush()?;
    }
    write_json(a.report.as_deref(), &report)
}

fn cutoff(a: &CutoffArgs) -> Result<()> {
    let model = NoiseModel::from_family(a.family, a.param)?;
    let c = noise::cutoff(&model, CutoffQuery::new(a.alpha, a.n)?)?;
    println!("{c}");
    Ok(())
}

fn calibrate(c: &CalibrateCommand) -> Result<()> {
    match c {
        CalibrateCommand::Rho(a) => {
            let est = calibration::estimate_rho(a.family, a.n, a.trials, a.seed)?;
            a.tables.apply(|t| {
                t.rho.insert(a.family, est);
                t.provenance = calibration::Provenance::Recalibrated { seed: a.seed, trials: a.trials };
            })?;
            write_json(
                None,
                &json!({ "family": a.family, "n": a.n, "trials": a.trials, "seed": a.seed, "rho": est }),
            )
        }
        CalibrateCommand::Compensation(a) => {
            if a.runs == 0 {
                return Err(Error::domain("at least one run required"));
            }
            let protocol = CompensationProtocol::standard(a.trials_per_delta);
            let fits = (0..a.runs)
                .map(|r| {
                    calibration::fit_compensation_constants(
                        a.family,
                        &protocol,
                        crate::rng::derive_seed(a.seed, r as u64),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let c1: Vec<f64> = fits.iter().map(|f| f.constants.c1).collect();
            let c2: Vec<f64> = fits.iter().map(|f| f.constants.c2).collect();
            let est = ConstantsEstimate { c1: calibration::mean_sd(&c1), c2: calibration::mean_sd(&c2) };
            a.tables.apply(|t| {
                t.constants.insert(a.family, est);
                t.provenance = calibration::Provenance::Recalibrated { seed: a.seed, trials: a.runs };
            })?;
            write_json(
                None,
                &json!({
                    "family": a.family,
                    "trials_per_delta": a.trials_per_delta,
                    "runs": a.runs,
                    "seed": a.seed,
                    "c1": est.c1,
                    "c2": est.c2,
                    "fits": fits,
                }),
            )
        }
    }
}

fn baseline(c: &BaselineCommand) -> Result<()> {
    match c {
        BaselineCommand::Entropy(a) => {
            let dgm = sublevel_persistence(&a.series.load()?)?;
            let labels = baselines::persistent_entropy_separation(&dgm)?;
            if let Some(path) = &a.labeled {
                let mut out = BufWriter::new(File::create(path)?);
                csvio::write_labeled_diagram(&mut out, &dgm, &labels)?;
                out.flush()?;
            }
            let signal = labels.iter().filter(|&&l| l == Label::Signal).count();
            // smallest lifetime labeled signal, i.e. the effective threshold
            let threshold = dgm
                .pairs()
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == Label::Signal)
                .map(|(p, _)| p.lifetime())
                .fold(f64::INFINITY, f64::min);
            write_json(
                None,
                &json!({
                    "method": "persistent_entropy",
                    "signal_pairs": signal,
                    "noise_pairs": labels.len() - signal,
                    "smallest_signal_lifetime": threshold.is_finite().then_some(threshold),
                    "labels": labels,
                }),
            )
        }
        BaselineCommand::Bootstrap(a) => {
            let cfg = BootstrapConfig {
                resamples: a.resamples,
                percentile: a.percentile,
                filter_cutoff: a.filter.cutoff(),
                filter_order: a.filter.filter_order,
                seed: a.seed,
            };
            let res = baselines::bootstrap_cutoff(&a.series.load()?, &cfg)?;
            let mut v = json!({
                "method": "bootstrap",
                "threshold": res.threshold,
                "percentile_distance": res.percentile_distance,
                "filter_cutoff_hz": res.filter_cutoff_hz,
                "config": cfg,
            });
            if a.distances {
                v["distances"] = json!(res.distances);
            }
            write_json(None, &v)
        }
        BaselineCommand::Sigma(a) => {
            let series = a.series.load()?;
            let config = anapt_config(a.family, a.alpha, a.calibration.as_deref())?;
            let report = estimator::analyze(&series, &config)?;
            let cutoff = a.filter.cutoff();
            let fc = cutoff.resolve(&series)?;
            write_json(
                None,
                &json!({
                    "method": "sigma",
                    "lowpass": baselines::lowpass_residual_sigma(&series, FilterCutoff::Fixed(fc), a.filter.filter_order)?,
                    "lowpass_cutoff_hz": fc,
                    "spline": baselines::spline_residual_sigma(&series)?,
                    "spline_step": baselines::spline_downsampling_step(&series)?,
                    "anapt": report.compensated_scale,
                    "anapt_raw": report.raw_scale,
                    "family": a.family,
                }),
            )
        }
    }
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let clean = match a.signal {
        Some(kind) => {
            let std = SignalSpec::standard(kind, a.amplitude);
            let mut spec = SignalSpec::new(
                kind,
                a.amplitude,
                a.t_start.unwrap_or(std.t_start),
                a.t_end.unwrap_or(std.t_end),
                a.rate.unwrap_or(std.sample_rate),
            );
            if let Some(w) = a.omega {
                spec = spec.with_omega(w);
            }
            signals::generate(&spec)?
        }
        None => {
            let n = a.n.ok_or_else(|| Error::domain("pure noise needs --n"))?;
            if a.noise.is_none() {
                return Err(Error::domain("pure noise needs --noise"));
            }
            TimeSeries::with_origin(vec![0.0; n], a.rate.unwrap_or(1.0), a.t_start.unwrap_or(0.0))?
        }
    };
    let series = match (a.noise, a.param, a.snr_db) {
        (None, None, None) => clean,
        (None, _, _) => return Err(Error::domain("--param and --snr-db need --noise")),
        (Some(family), Some(p), None) => signals::add_noise(&clean, &NoiseModel::from_family(family, p)?, a.seed)?,
        (Some(Family::Gaussian), None, Some(snr)) => {
            let sigma = signals::sigma_from_snr(&clean, snr)?;
            signals::add_noise(&clean, &NoiseModel::gaussian(sigma, 0.0)?, a.seed)?
        }
        (Some(_), None, Some(_)) => return Err(Error::domain("--snr-db applies to Gaussian noise only")),
        (Some(family), None, None) => signals::add_noise(&clean, &NoiseModel::standard(family), a.seed)?,
        (Some(_), Some(_), Some(_)) => unreachable!("clap rejects --param with --snr-db"),
    };
    let mut out = sink(a.output.as_deref())?;
    csvio::write_series(&mut out, &series)?;
    out.flush()?;
    Ok(())
}

fn render_cmd(a: &RenderArgs) -> Result<()> {
    if let Some(c) = a.cutoff {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("cutoff must be a finite non-negative number, got {c}")));
        }
    }
    if !(a.size >= 100.0 && a.size.is_finite()) {
        return Err(Error::domain("size must be at least 100"));
    }
    let dgm = csvio::read_diagram_file(&a.diagram, 0)?;
    let svg = render::diagram_svg(&dgm, a.cutoff, &RenderOptions { size: a.size, title: a.title.clone(), ..Default::default() });
    let mut out = sink(a.output.as_deref())?;
    out.write_all(svg.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Persist(a) => persist(a),
        Command::Analyze(a) => analyze(a),
        Command::Cutoff(a) => cutoff(a),
        Command::Calibrate(c) => calibrate(c),
        Command::Baseline(c) => baseline(c),
        Command::Simulate(a) => simulate(a),
        Command::Render(a) => render_cmd(a),
    }
}

fn report_error(kind: &str, message: &str) {
    let _ = writeln!(io::stderr(), "{}", json!({ "error": kind, "message": message }));
}

/// Parse arguments, run, and map failures to the JSON error convention.
pub fn main_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_error("DomainError", e.render().to_string().trim_end());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            ExitCode::FAILURE
        }
    }
}
