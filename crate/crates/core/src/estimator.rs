//! Cutoff estimation from the diagram itself.
//!
//! The median lifetime is robust to the signal pairs as long as they are a
//! minority. Multiplying it by the family's mean-to-median ratio `rho` gives
//! an estimate of the noise mean lifetime, which fixes the distribution
//! parameter and hence the cutoff. A smooth signal underneath the noise
//! shortens noise lifetimes; the compensation factor
//! `R = exp(c1 (delta / (delta + L))^c2)` undoes that, with `delta` estimated
//! from the lifetimes above the raw cutoff.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{self, CutoffQuery, Family, NoiseModel};
use crate::persistence::{sublevel_persistence, PersistenceDiagram, PersistencePair};
use crate::series::TimeSeries;

/// Mean-to-median lifetime ratio of iid noise, per family.
pub fn default_rho(family: Family) -> f64 {
    match family {
        Family::Gaussian => 1.154,
        Family::Uniform => 1.000,
        Family::Rayleigh => 1.136,
        Family::Exponential => 1.265,
    }
}

/// Constants of the compensation factor `R = exp(c1 (delta / (delta + L))^c2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompensationConstants {
    pub c1: f64,
    pub c2: f64,
}

impl CompensationConstants {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        let c = Self { c1, c2 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c1.is_finite() && self.c2.is_finite() && self.c1 > 0.0 && self.c2 > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "compensation constants must be positive, got c1 = {}, c2 = {}",
                self.c1, self.c2
            )))
        }
    }

    pub fn defaults(family: Family) -> Self {
        match family {
            Family::Gaussian => Self { c1: 0.845, c2: 0.809 },
            Family::Uniform => Self { c1: 0.880, c2: 0.639 },
            Family::Rayleigh => Self { c1: 0.726, c2: 0.605 },
            Family::Exponential => Self { c1: 0.436, c2: 0.393 },
        }
    }
}

/// Median of the finite lifetimes; the mean of the middle two for an even
/// count.
pub fn median_lifetime(dgm: &PersistenceDiagram) -> Result<f64> {
    median(&dgm.lifetimes()).ok_or(Error::EmptyDiagram)
}

pub(crate) fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    let mid = v.len() / 2;
    let (lower, &mut upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    if values.len() % 2 == 1 {
        Some(upper)
    } else {
        let below = lower.iter().copied().max_by(f64::total_cmp).expect("even length >= 2");
        Some(0.5 * (below + upper))
    }
}

fn positive_median(median_lifetime: f64) -> Result<f64> {
    if median_lifetime.is_finite() && median_lifetime > 0.0 {
        Ok(median_lifetime)
    } else {
        Err(Error::domain(format!("median lifetime must be positive, got {median_lifetime}")))
    }
}

/// Noise model whose mean lifetime equals `rho * median_lifetime`.
pub fn model_from_median(family: Family, median_lifetime: f64, rho: f64) -> Result<NoiseModel> {
    let l = positive_median(median_lifetime)?;
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::domain(format!("rho must be positive, got {rho}")));
    }
    let scale = rho * l / noise::unit_mean_lifetime(family);
    let parameter = if family == Family::Exponential { 1.0 / scale } else { scale };
    NoiseModel::from_family(family, parameter)
}

/// Family parameter (sigma, delta, sigma or lambda) estimated from the
/// median lifetime with the default `rho`.
pub fn estimate_parameter(family: Family, median_lifetime: f64) -> Result<f64> {
    Ok(model_from_median(family, median_lifetime, default_rho(family))?.parameter())
}

/// Cutoff of the model estimated from the median lifetime.
pub fn cutoff_from_median(family: Family, median_lifetime: f64, alpha: f64, n: usize) -> Result<f64> {
    let model = model_from_median(family, median_lifetime, default_rho(family))?;
    noise::cutoff(&model, CutoffQuery::new(alpha, n)?)
}

/// `(2 / n) * sum` of the lifetimes strictly above `raw_cutoff`, where `n`
/// is the number of samples in the series.
pub fn estimate_delta(lifetimes: &[f64], raw_cutoff: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("series length must be at least 2, got {n}")));
    }
    let sum: f64 = lifetimes.iter().filter(|&&l| l > raw_cutoff).sum();
    Ok(2.0 * sum / n as f64)
}

pub fn compensation_factor(
    delta: f64,
    median_lifetime: f64,
    constants: CompensationConstants,
) -> Result<f64> {
    let l = positive_median(median_lifetime)?;
    constants.validate()?;
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::domain(format!("delta must be non-negative, got {delta}")));
    }
    Ok((constants.c1 * (delta / (delta + l)).powf(constants.c2)).exp())
}

/// Settings of one analysis run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnaptConfig {
    pub family: Family,
    pub alpha: f64,
    pub rho: f64,
    pub constants: CompensationConstants,
}

impl AnaptConfig {
    /// Default `rho` and compensation constants at the default `alpha`.
    pub fn new(family: Family) -> Self {
        Self {
            family,
            alpha: noise::DEFAULT_ALPHA,
            rho: default_rho(family),
            constants: CompensationConstants::defaults(family),
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }
}

/// Output of the full pipeline.
///
/// `raw_param` and `compensated_param` are the family's own parameter. For
/// the scale families `compensated_param = r * raw_param`; for the
/// exponential family the rate is divided by `r` instead, so that
/// `compensated_scale = r * raw_scale` holds for every family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    pub family: Family,
    pub alpha: f64,
    pub n: usize,
    pub rho: f64,
    pub c1: f64,
    pub c2: f64,
    pub median_lifetime: f64,
    pub raw_param: f64,
    pub raw_scale: f64,
    pub raw_cutoff: f64,
    pub pairs_above_raw_cutoff: usize,
    pub delta: f64,
    pub r: f64,
    pub compensated_param: f64,
    pub compensated_scale: f64,
    pub compensated_cutoff: f64,
    /// False when more than half of the pairs exceed the raw cutoff: the
    /// median is then dominated by signal and the estimate is unreliable.
    pub reliable: bool,
    pub signal_pairs: Vec<PersistencePair>,
    pub noise_pairs: Vec<PersistencePair>,
}

impl CutoffReport {
    pub fn total_pairs(&self) -> usize {
        self.signal_pairs.len() + self.noise_pairs.len()
    }
}

/// Diagram, median lifetime, parameter and cutoff, then one compensation
/// step. Pairs with lifetime strictly above the compensated cutoff are
/// labeled signal.
pub fn anapt(series: &TimeSeries, family: Family, alpha: f64) -> Result<CutoffReport> {
    analyze(series, &AnaptConfig::new(family).with_alpha(alpha))
}

pub fn analyze(series: &TimeSeries, config: &AnaptConfig) -> Result<CutoffReport> {
    analyze_diagram(&sublevel_persistence(series)?, config)
}

/// Pipeline starting from a diagram; `n` is taken from its sample count.
pub fn analyze_diagram(dgm: &PersistenceDiagram, config: &AnaptConfig) -> Result<CutoffReport> {
    let n = dgm.n_samples();
    let query = CutoffQuery::new(config.alpha, n)?;
    let lifetimes = dgm.lifetimes();
    let median_lifetime = median(&lifetimes).ok_or(Error::EmptyDiagram)?;
    let raw = model_from_median(config.family, median_lifetime, config.rho)?;
    let raw_cutoff = noise::cutoff(&raw, query)?;
    let pairs_above_raw_cutoff = lifetimes.iter().filter(|&&l| l > raw_cutoff).count();
    let delta = estimate_delta(&lifetimes, raw_cutoff, n)?;
    let r = compensation_factor(delta, median_lifetime, config.constants)?;
    let compensated_scale = r * raw.scale();
    let compensated_param =
        if config.family == Family::Exponential { 1.0 / compensated_scale } else { compensated_scale };
    let compensated_cutoff = r * raw_cutoff;
    let (signal_pairs, noise_pairs) =
        dgm.pairs().iter().partition(|p| p.lifetime() > compensated_cutoff);
    Ok(CutoffReport {
        family: config.family,
        alpha: config.alpha,
        n,
        rho: config.rho,
        c1: config.constants.c1,
        c2: config.constants.c2,
        median_lifetime,
        raw_param: raw.parameter(),
        raw_scale: raw.scale(),
        raw_cutoff,
        pairs_above_raw_cutoff,
        delta,
        r,
        compensated_param,
        compensated_scale,
        compensated_cutoff,
        reliable: 2 * pairs_above_raw_cutoff <= lifetimes.len(),
        signal_pairs,
        noise_pairs,
    })
}
