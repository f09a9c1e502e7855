//! Additive-noise models: distribution functions, the densities of births
//! and deaths they induce in a sublevel-set diagram, the mean lifetime, and
//! the lifetime cutoff for a given confidence level and series length.
//!
//! The cutoff bounds the largest noise lifetime by the range of the noise
//! sample. With `q = 1 - (1 - sqrt(alpha))^(1/n)` it is
//!
//! ```text
//! C = F^-1(1 - q) - F^-1(q)
//! ```
//!
//! which reduces to `2 (F^-1(1 - q) - mu)` for distributions symmetric about
//! `mu`. Note that `max(L) <= max(eps) - min(eps)` is only approximately an
//! equality, so `alpha` is an approximate exceedance probability.
//!
//! `q` is tiny for realistic `n` (about 3e-7 at `n = 1e5`), so it is formed
//! as `-expm1(log1p(-sqrt(alpha)) / n)` and each closed form is written in
//! terms of `q` directly.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::series::TimeSeries;
use crate::special::{erf, erfc, erfcinv};

/// Default confidence level.
pub const DEFAULT_ALPHA: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[derive(clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Uniform,
    Rayleigh,
    Exponential,
}

impl Family {
    pub const ALL: [Family; 4] =
        [Family::Gaussian, Family::Uniform, Family::Rayleigh, Family::Exponential];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Uniform => "uniform",
            Family::Rayleigh => "rayleigh",
            Family::Exponential => "exponential",
        }
    }

    /// Name of the single distribution parameter.
    pub fn parameter_name(self) -> &'static str {
        match self {
            Family::Gaussian | Family::Rayleigh => "sigma",
            Family::Uniform => "delta",
            Family::Exponential => "lambda",
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, Family::Gaussian | Family::Uniform)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::domain(format!("unknown noise family '{s}'")))
    }
}

/// One of the four additive-noise distributions. Uniform noise is centred on
/// zero with total width `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum NoiseModel {
    Gaussian { sigma: f64, mu: f64 },
    Uniform { delta: f64 },
    Rayleigh { sigma: f64 },
    Exponential { lambda: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

impl NoiseModel {
    pub fn gaussian(sigma: f64, mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain("mu must be finite"));
        }
        Ok(NoiseModel::Gaussian { sigma: positive("sigma", sigma)?, mu })
    }

    pub fn uniform(delta: f64) -> Result<Self> {
        Ok(NoiseModel::Uniform { delta: positive("delta", delta)? })
    }

    pub fn rayleigh(sigma: f64) -> Result<Self> {
        Ok(NoiseModel::Rayleigh { sigma: positive("sigma", sigma)? })
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        Ok(NoiseModel::Exponential { lambda: positive("lambda", lambda)? })
    }

    /// Model of `family` with its natural parameter (sigma, delta, sigma,
    /// lambda). Gaussian noise is zero-mean.
    pub fn from_family(family: Family, parameter: f64) -> Result<Self> {
        match family {
            Family::Gaussian => Self::gaussian(parameter, 0.0),
            Family::Uniform => Self::uniform(parameter),
            Family::Rayleigh => Self::rayleigh(parameter),
            Family::Exponential => Self::exponential(parameter),
        }
    }

    /// Unit-scale model of `family`.
    pub fn standard(family: Family) -> Self {
        Self::from_family(family, 1.0).expect("unit parameter is valid")
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Gaussian { sigma, mu } => Self::gaussian(sigma, mu).map(drop),
            NoiseModel::Uniform { delta } => Self::uniform(delta).map(drop),
            NoiseModel::Rayleigh { sigma } => Self::rayleigh(sigma).map(drop),
            NoiseModel::Exponential { lambda } => Self::exponential(lambda).map(drop),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            NoiseModel::Gaussian { .. } => Family::Gaussian,
            NoiseModel::Uniform { .. } => Family::Uniform,
            NoiseModel::Rayleigh { .. } => Family::Rayleigh,
            NoiseModel::Exponential { .. } => Family::Exponential,
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            NoiseModel::Gaussian { sigma, .. } | NoiseModel::Rayleigh { sigma } => sigma,
            NoiseModel::Uniform { delta } => delta,
            NoiseModel::Exponential { lambda } => lambda,
        }
    }

    /// Length scale of the distribution: every lifetime statistic is
    /// proportional to it.
    pub fn scale(&self) -> f64 {
        match *self {
            NoiseModel::Gaussian { sigma, .. } | NoiseModel::Rayleigh { sigma } => sigma,
            NoiseModel::Uniform { delta } => delta,
            NoiseModel::Exponential { lambda } => 1.0 / lambda,
        }
    }
}

/// Confidence level and series length for a cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffQuery {
    pub alpha: f64,
    pub n: usize,
}

impl CutoffQuery {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        let q = Self { alpha, n };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.n < 2 {
            return Err(Error::domain(format!("series length must be at least 2, got {}", self.n)));
        }
        Ok(())
    }

    /// `ln((1 - sqrt(alpha))^(1/n))`, the log of the upper quantile level.
    pub fn log_upper_level(&self) -> f64 {
        (-self.alpha.sqrt()).ln_1p() / self.n as f64
    }

    /// `1 - (1 - sqrt(alpha))^(1/n)`, the tail probability on each side.
    pub fn tail_probability(&self) -> f64 {
        -self.log_upper_level().exp_m1()
    }

    /// `(1 - sqrt(alpha))^(1/n)`
    pub fn upper_level(&self) -> f64 {
        self.log_upper_level().exp()
    }
}

pub fn pdf(model: &NoiseModel, z: f64) -> f64 {
    match *model {
        NoiseModel::Gaussian { sigma, mu } => {
            let t = (z - mu) / sigma;
            (-0.5 * t * t).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        }
        NoiseModel::Uniform { delta } => {
            if z.abs() <= delta / 2.0 {
                1.0 / delta
            } else {
                0.0
            }
        }
        NoiseModel::Rayleigh { sigma } => {
            if z < 0.0 {
                0.0
            } else {
                z / (sigma * sigma) * (-z * z / (2.0 * sigma * sigma)).exp()
            }
        }
        NoiseModel::Exponential { lambda } => {
            if z < 0.0 {
                0.0
            } else {
                lambda * (-lambda * z).exp()
            }
        }
    }
}

pub fn cdf(model: &NoiseModel, z: f64) -> f64 {
    match *model {
        NoiseModel::Gaussian { sigma, mu } => {
            let t = (z - mu) / (sigma * std::f64::consts::SQRT_2);
            if t < 0.0 {
                0.5 * erfc(-t)
            } else {
                0.5 * (1.0 + erf(t))
            }
        }
        NoiseModel::Uniform { delta } => ((2.0 * z + delta) / (2.0 * delta)).clamp(0.0, 1.0),
        NoiseModel::Rayleigh { sigma } => {
            if z <= 0.0 {
                0.0
            } else {
                -(-z * z / (2.0 * sigma * sigma)).exp_m1()
            }
        }
        NoiseModel::Exponential { lambda } => {
            if z <= 0.0 {
                0.0
            } else {
                -(-lambda * z).exp_m1()
            }
        }
    }
}

/// Quantile function on the open interval (0, 1).
pub fn inverse_cdf(model: &NoiseModel, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain(format!("quantile level must lie in (0, 1), got {u}")));
    }
    Ok(match *model {
        NoiseModel::Gaussian { sigma, mu } => {
            let x = if u < 0.5 { -erfcinv(2.0 * u) } else { erfcinv(2.0 * (1.0 - u)) };
            mu + std::f64::consts::SQRT_2 * sigma * x
        }
        NoiseModel::Uniform { delta } => delta * (u - 0.5),
        NoiseModel::Rayleigh { sigma } => sigma * (-2.0 * (-u).ln_1p()).sqrt(),
        NoiseModel::Exponential { lambda } => -(-u).ln_1p() / lambda,
    })
}

/// Density of sublevel-set birth heights (local minima) of iid noise:
/// `3 f (1 - F)^2`.
pub fn birth_density(model: &NoiseModel, z: f64) -> f64 {
    let s = 1.0 - cdf(model, z);
    3.0 * pdf(model, z) * s * s
}

/// Density of death heights (local maxima): `3 f F^2`.
pub fn death_density(model: &NoiseModel, z: f64) -> f64 {
    let c = cdf(model, z);
    3.0 * pdf(model, z) * c * c
}

/// Composite Simpson rule with `intervals` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..m {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

/// Number of Simpson subintervals (10^6 + 1 nodes) for the mean lifetime.
pub const MEAN_LIFETIME_INTERVALS: usize = 1_000_000;

/// Expected lifetime of a finite pair in the diagram of iid noise,
/// `3 ∫ F (1 - F) dz`. Closed forms for uniform (`delta / 2`) and
/// exponential (`3 / (2 lambda)`); Simpson quadrature for Gaussian over
/// `mu ± 10 sigma` and Rayleigh over `[0, 20 sigma]`.
pub fn mean_lifetime(model: &NoiseModel) -> f64 {
    let integrand = |z: f64| {
        let c = cdf(model, z);
        3.0 * c * (1.0 - c)
    };
    match *model {
        NoiseModel::Gaussian { sigma, mu } => {
            simpson(integrand, mu - 10.0 * sigma, mu + 10.0 * sigma, MEAN_LIFETIME_INTERVALS)
        }
        NoiseModel::Rayleigh { sigma } => {
            simpson(integrand, 0.0, 20.0 * sigma, MEAN_LIFETIME_INTERVALS)
        }
        NoiseModel::Uniform { delta } => delta / 2.0,
        NoiseModel::Exponential { lambda } => 1.5 / lambda,
    }
}

/// Mean lifetime of the unit-scale model, computed once per family.
pub fn unit_mean_lifetime(family: Family) -> f64 {
    static GAUSSIAN: OnceLock<f64> = OnceLock::new();
    static RAYLEIGH: OnceLock<f64> = OnceLock::new();
    match family {
        Family::Gaussian => *GAUSSIAN.get_or_init(|| mean_lifetime(&NoiseModel::standard(family))),
        Family::Rayleigh => *RAYLEIGH.get_or_init(|| mean_lifetime(&NoiseModel::standard(family))),
        Family::Uniform | Family::Exponential => mean_lifetime(&NoiseModel::standard(family)),
    }
}

/// Lifetime cutoff `C_alpha` in closed form.
pub fn cutoff(model: &NoiseModel, q: CutoffQuery) -> Result<f64> {
    model.validate()?;
    q.validate()?;
    let tail = q.tail_probability();
    let c = match *model {
        // 2 F^-1(1 - q) with mu = 0; the mean shift does not move lifetimes
        NoiseModel::Gaussian { sigma, .. } => 2.0 * std::f64::consts::SQRT_2 * sigma * erfcinv(2.0 * tail),
        NoiseModel::Uniform { delta } => delta * (1.0 - 2.0 * tail),
        NoiseModel::Rayleigh { sigma } => {
            sigma * ((-2.0 * tail.ln()).sqrt() - (-2.0 * q.log_upper_level()).sqrt())
        }
        NoiseModel::Exponential { lambda } => (q.log_upper_level() - tail.ln()) / lambda,
    };
    check_cutoff(c, q)
}

fn check_cutoff(c: f64, q: CutoffQuery) -> Result<f64> {
    if c.is_finite() && c > 0.0 {
        Ok(c)
    } else {
        Err(Error::domain(format!(
            "no positive cutoff for alpha = {} and n = {} (got {c})",
            q.alpha, q.n
        )))
    }
}

/// Symmetric form `2 (F^-1(u) - mu)` evaluated through [`inverse_cdf`].
/// Only meaningful for the Gaussian and uniform models.
pub fn cutoff_symmetric_generic(model: &NoiseModel, q: CutoffQuery) -> Result<f64> {
    q.validate()?;
    let center = match *model {
        NoiseModel::Gaussian { mu, .. } => mu,
        NoiseModel::Uniform { .. } => 0.0,
        _ => return Err(Error::domain(format!("{} noise is not symmetric", model.family()))),
    };
    check_cutoff(2.0 * (inverse_cdf(model, q.upper_level())? - center), q)
}

/// General form `F^-1(u) - F^-1(1 - u)` evaluated through [`inverse_cdf`].
pub fn cutoff_generic(model: &NoiseModel, q: CutoffQuery) -> Result<f64> {
    q.validate()?;
    let b = inverse_cdf(model, q.upper_level())?;
    let a = inverse_cdf(model, q.tail_probability())?;
    check_cutoff(b - a, q)
}

/// `n` iid draws by inversion of a seeded uniform stream, at unit sample rate.
pub fn sample(model: &NoiseModel, n: usize, seed: u64) -> Result<TimeSeries> {
    model.validate()?;
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let mut rng = rng::stream(seed);
    let values = (0..n)
        .map(|_| inverse_cdf(model, rng::open_unit(&mut rng)))
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::from_values(values)
}
