//! Monte Carlo estimates of the empirical constants used by the estimator:
//! the mean-to-median lifetime ratio `rho` and the compensation constants
//! `(c1, c2)`.
//!
//! Trials run in parallel, each with its own seed derived from the caller's
//! seed and the trial's position, and are reduced in trial order, so results
//! are bit-for-bit reproducible.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{default_rho, median, CompensationConstants};
use crate::noise::{self, Family, NoiseModel};
use crate::optimize::NelderMead;
use crate::persistence::sublevel_persistence;
use crate::rng::derive_seed;
use crate::series::TimeSeries;
use crate::signals::{self, SignalKind, SignalSpec};

/// A value with its standard deviation across trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub sd: f64,
}

pub(crate) fn mean_sd(values: &[f64]) -> Estimate {
    let n = values.len() as f64;
    let value = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - value).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Estimate { value, sd: var.sqrt() }
}

/// Mean and sample standard deviation over trials of `mean / median`
/// lifetime of pure unit-scale noise of length `n`.
pub fn estimate_rho(family: Family, n: usize, trials: usize, seed: u64) -> Result<Estimate> {
    if n < 1000 || trials < 2 {
        return Err(Error::domain("rho estimation needs n >= 1000 and at least 2 trials"));
    }
    let model = NoiseModel::standard(family);
    let ratios = (0..trials)
        .into_par_iter()
        .map(|t| {
            let x = noise::sample(&model, n, derive_seed(seed, t as u64))?;
            let lt = sublevel_persistence(&x)?.lifetimes();
            let mean = lt.iter().sum::<f64>() / lt.len() as f64;
            Ok(mean / median(&lt).ok_or(Error::EmptyDiagram)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_sd(&ratios))
}

/// Mean lifetime of one pure-noise series of length `n` next to the
/// quadrature (or closed-form) value, both at unit scale.
pub fn validate_mean_lifetime(family: Family, n: usize, seed: u64) -> Result<(f64, f64)> {
    if n < 10_000 {
        return Err(Error::domain("mean lifetime validation needs n >= 10000"));
    }
    let model = NoiseModel::standard(family);
    let lt = sublevel_persistence(&noise::sample(&model, n, seed)?)?.lifetimes();
    Ok((lt.iter().sum::<f64>() / lt.len() as f64, noise::mean_lifetime(&model)))
}

/// Median absolute first difference of a noise-free signal.
pub fn median_step(signal: &TimeSeries) -> Result<f64> {
    signal.require_len(2)?;
    let steps: Vec<f64> = signal.values().windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    Ok(median(&steps).expect("at least one step"))
}

/// Protocol of the compensation fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompensationProtocol {
    pub templates: Vec<SignalKind>,
    /// Targets for `delta / scale`; the amplitude of each template is set so
    /// that its median step hits each target.
    pub delta_grid: Vec<f64>,
    pub trials_per_delta: usize,
}

impl CompensationProtocol {
    /// The three template functions on their standard domains at 20 Hz,
    /// `delta / scale` from 0 to 2 in steps of 0.05.
    pub fn standard(trials_per_delta: usize) -> Self {
        Self {
            templates: vec![SignalKind::Wood1, SignalKind::Wood2, SignalKind::Wood3],
            delta_grid: (0..=40).map(|i| i as f64 * 0.05).collect(),
            trials_per_delta,
        }
    }
}

/// Mean median lifetime of one template at one step size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub template: SignalKind,
    pub delta: f64,
    pub amplitude: f64,
    pub median_lifetime: Estimate,
    pub trials: usize,
}

/// Mean median lifetimes over the protocol's grid, unit-scale noise.
pub fn compensation_sweep(family: Family, protocol: &CompensationProtocol, seed: u64) -> Result<Vec<SweepPoint>> {
    if protocol.trials_per_delta < 2 || protocol.templates.is_empty() {
        return Err(Error::domain("sweep needs templates and at least 2 trials per step size"));
    }
    let model = NoiseModel::standard(family);
    let scale = model.scale();
    let mut jobs = Vec::new();
    for (ti, &kind) in protocol.templates.iter().enumerate() {
        let unit = signals::generate(&SignalSpec::standard(kind, 1.0))?;
        let unit_step = median_step(&unit)?;
        if !(unit_step > 0.0) {
            return Err(Error::domain(format!("template {kind:?} has zero median step")));
        }
        for (di, &target) in protocol.delta_grid.iter().enumerate() {
            if !(target.is_finite() && target >= 0.0) {
                return Err(Error::domain("step-size targets must be non-negative"));
            }
            let amplitude = target * scale / unit_step;
            jobs.push((ti, di, kind, amplitude, unit.map(|v| v * amplitude)?));
        }
    }
    jobs.par_iter()
        .map(|(ti, di, kind, amplitude, clean)| {
            let medians = (0..protocol.trials_per_delta)
                .map(|t| {
                    let stream = ((*ti as u64) << 48) | ((*di as u64) << 24) | t as u64;
                    let x = signals::add_noise(clean, &model, derive_seed(seed, stream))?;
                    median(&sublevel_persistence(&x)?.lifetimes()).ok_or(Error::EmptyDiagram)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepPoint {
                template: *kind,
                delta: median_step(clean)?,
                amplitude: *amplitude,
                median_lifetime: mean_sd(&medians),
                trials: protocol.trials_per_delta,
            })
        })
        .collect()
}

/// Template `L0 exp(-c1 (delta / (delta + L))^c2)` evaluated at a sweep
/// point, with `L` the point's own mean median lifetime.
pub fn template_value(l0: f64, delta: f64, l: f64, c: CompensationConstants) -> f64 {
    l0 * (-c.c1 * (delta / (delta + l)).powf(c.c2)).exp()
}

fn sum_sq(points: &[SweepPoint], l0: &BTreeMap<SignalKind, f64>, c: CompensationConstants) -> f64 {
    points
        .iter()
        .map(|p| {
            let l = p.median_lifetime.value;
            (l - template_value(l0[&p.template], p.delta, l, c)).powi(2)
        })
        .sum()
}

/// Fitted constants with the per-template RMS residual relative to `L0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompensationFit {
    pub constants: CompensationConstants,
    pub cost: f64,
    pub iterations: usize,
    pub relative_rms: BTreeMap<SignalKind, f64>,
}

pub const FIT_START: (f64, f64) = (0.8, 0.7);
const FIT_MAX_ITERATIONS: usize = 2000;

/// Points of each template up to where its mean median lifetime stops
/// decreasing, i.e. rises more than two standard errors above the running
/// minimum. Past that point the template's own persistence pairs make up a
/// large share of the diagram and the median no longer tracks the noise.
pub fn decreasing_branch(points: &[SweepPoint]) -> Vec<SweepPoint> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.template.cmp(&b.template).then(a.delta.total_cmp(&b.delta)));
    let mut kept = Vec::with_capacity(sorted.len());
    let mut current = None;
    let mut lowest = f64::INFINITY;
    let mut stopped = false;
    for p in sorted {
        if current != Some(p.template) {
            current = Some(p.template);
            lowest = f64::INFINITY;
            stopped = false;
        }
        let se = p.median_lifetime.sd / (p.trials.max(1) as f64).sqrt();
        if stopped || p.median_lifetime.value > lowest + 2.0 * se {
            stopped = true;
            continue;
        }
        lowest = lowest.min(p.median_lifetime.value);
        kept.push(p);
    }
    kept
}

/// Least-squares fit of `(c1, c2)` to the decreasing branch of a sweep.
/// `L0` of each template is its mean median lifetime at zero step size.
pub fn fit_sweep(points: &[SweepPoint]) -> Result<CompensationFit> {
    let points = &decreasing_branch(points)[..];
    let mut l0 = BTreeMap::new();
    for p in points.iter().filter(|p| p.delta == 0.0) {
        l0.insert(p.template, p.median_lifetime.value);
    }
    let informative = points.iter().filter(|p| p.delta > 0.0).count();
    let missing = points.iter().any(|p| !l0.contains_key(&p.template));
    if informative < 2 || missing {
        return Err(Error::InsufficientDeltaRange(format!(
            "need a zero step size and at least two positive ones per template, got {informative} positive"
        )));
    }
    let cost = |p: &[f64]| {
        if p[0] <= 0.0 || p[1] <= 0.0 {
            f64::INFINITY
        } else {
            sum_sq(points, &l0, CompensationConstants { c1: p[0], c2: p[1] })
        }
    };
    let initial = cost(&[FIT_START.0, FIT_START.1]);
    let nm = NelderMead { max_iterations: FIT_MAX_ITERATIONS, ..Default::default() };
    let min = nm.minimize(cost, &[FIT_START.0, FIT_START.1]);
    if !(min.converged && min.value.is_finite() && min.value <= initial) {
        return Err(Error::OptimizerDiverged { iterations: min.iterations });
    }
    let (best, best_cost) = (min.point, min.value);
    let constants = CompensationConstants::new(best[0], best[1])?;
    let mut relative_rms = BTreeMap::new();
    for (&kind, &base) in &l0 {
        let res: Vec<f64> = points
            .iter()
            .filter(|p| p.template == kind)
            .map(|p| {
                let l = p.median_lifetime.value;
                l - template_value(base, p.delta, l, constants)
            })
            .collect();
        let rms = (res.iter().map(|r| r * r).sum::<f64>() / res.len() as f64).sqrt();
        relative_rms.insert(kind, rms / base);
    }
    Ok(CompensationFit { constants, cost: best_cost, iterations: min.iterations, relative_rms })
}

/// Sweep and fit for one family.
pub fn fit_compensation_constants(
    family: Family,
    protocol: &CompensationProtocol,
    seed: u64,
) -> Result<CompensationFit> {
    if protocol.trials_per_delta < 10 {
        return Err(Error::domain("compensation fit needs at least 10 trials per step size"));
    }
    if protocol.delta_grid.iter().filter(|&&d| d > 0.0).count() < 2 {
        return Err(Error::InsufficientDeltaRange(
            "step-size grid has fewer than two positive values".into(),
        ));
    }
    fit_sweep(&compensation_sweep(family, protocol, seed)?)
}

/// Constants with their standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsEstimate {
    pub c1: Estimate,
    pub c2: Estimate,
}

impl ConstantsEstimate {
    pub fn constants(&self) -> CompensationConstants {
        CompensationConstants { c1: self.c1.value, c2: self.c2.value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Defaults,
    Recalibrated { seed: u64, trials: usize },
}

/// Per-family `rho` and compensation constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTables {
    pub rho: BTreeMap<Family, Estimate>,
    pub constants: BTreeMap<Family, ConstantsEstimate>,
    pub provenance: Provenance,
}

impl Default for CalibrationTables {
    fn default() -> Self {
        let rho_3sd = |f| match f {
            Family::Gaussian => 0.012,
            Family::Uniform => 0.010,
            Family::Rayleigh => 0.013,
            Family::Exponential => 0.016,
        };
        let const_sd = |f| match f {
            Family::Gaussian => (0.029, 0.061),
            Family::Uniform => (0.017, 0.026),
            Family::Rayleigh => (0.026, 0.054),
            Family::Exponential => (0.036, 0.075),
        };
        let rho = Family::ALL
            .iter()
            .map(|&f| (f, Estimate { value: default_rho(f), sd: rho_3sd(f) / 3.0 }))
            .collect();
        let constants = Family::ALL
            .iter()
            .map(|&f| {
                let c = CompensationConstants::defaults(f);
                let (s1, s2) = const_sd(f);
                (f, ConstantsEstimate { c1: Estimate { value: c.c1, sd: s1 }, c2: Estimate { value: c.c2, sd: s2 } })
            })
            .collect();
        Self { rho, constants, provenance: Provenance::Defaults }
    }
}

impl CalibrationTables {
    pub fn rho(&self, family: Family) -> f64 {
        self.rho.get(&family).map_or_else(|| default_rho(family), |e| e.value)
    }

    pub fn compensation(&self, family: Family) -> CompensationConstants {
        self.constants
            .get(&family)
            .map_or_else(|| CompensationConstants::defaults(family), |e| e.constants())
    }

    /// Replace `family`'s entries with Monte Carlo estimates. `rho` uses
    /// `rho_n` samples per trial; the constants are fitted `runs` times on
    /// independent sweeps and averaged.
    pub fn recalibrate(
        &mut self,
        family: Family,
        rho_n: usize,
        runs: usize,
        protocol: &CompensationProtocol,
        seed: u64,
    ) -> Result<()> {
        self.rho.insert(family, estimate_rho(family, rho_n, runs, derive_seed(seed, 0))?);
        let fits = (0..runs)
            .map(|r| fit_compensation_constants(family, protocol, derive_seed(seed, 1 + r as u64)))
            .collect::<Result<Vec<_>>>()?;
        let c1: Vec<f64> = fits.iter().map(|f| f.constants.c1).collect();
        let c2: Vec<f64> = fits.iter().map(|f| f.constants.c2).collect();
        self.constants.insert(family, ConstantsEstimate { c1: mean_sd(&c1), c2: mean_sd(&c2) });
        self.provenance = Provenance::Recalibrated { seed, trials: runs };
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for e in self.rho.values() {
            if !(e.value > 0.0 && e.sd >= 0.0) {
                return Err(Error::domain("calibration rho must be positive with sd >= 0"));
            }
        }
        for e in self.constants.values() {
            e.constants().validate()?;
            if !(e.c1.sd >= 0.0 && e.c2.sd >= 0.0) {
                return Err(Error::domain("calibration uncertainties must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
            _ => e.into(),
        })?;
        let tables: Self = serde_json::from_str(&text)?;
        tables.validate()?;
        Ok(tables)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
