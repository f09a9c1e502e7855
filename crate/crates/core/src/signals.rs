//! Test signals: the three Lipschitz template functions, a quasiperiodic
//! signal, a plain sinusoid and the x-coordinate of the Lorenz system, plus
//! additive noise at a given signal-to-noise ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{self, NoiseModel};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[derive(clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    /// `t - t^3 / 3`
    Wood1,
    /// `sin t + sin(2t / 3)`
    Wood2,
    /// `-sum_{i=1..5} sin((i + 1) t + i)`
    Wood3,
    /// `sin(pi t) + sin t`
    Quasiperiodic,
    /// `sin(omega t)`
    Sinusoid,
    /// x-coordinate of the Lorenz system with default parameters, started
    /// from (1, 1, 1) at t = 0
    LorenzX,
}

impl SignalKind {
    /// Value of the unit-amplitude signal at time `t`. Not defined for
    /// [`SignalKind::LorenzX`], which has no closed form.
    pub fn eval(self, t: f64, omega: f64) -> Option<f64> {
        Some(match self {
            SignalKind::Wood1 => t - t * t * t / 3.0,
            SignalKind::Wood2 => t.sin() + (2.0 * t / 3.0).sin(),
            SignalKind::Wood3 => -(1..=5).map(|i| ((i + 1) as f64 * t + i as f64).sin()).sum::<f64>(),
            SignalKind::Quasiperiodic => (std::f64::consts::PI * t).sin() + t.sin(),
            SignalKind::Sinusoid => (omega * t).sin(),
            SignalKind::LorenzX => return None,
        })
    }
}

/// A signal `amplitude * f(t)` sampled on `t_start + k / sample_rate` up to
/// and including `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub amplitude: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub sample_rate: f64,
    /// Angular frequency of [`SignalKind::Sinusoid`]; ignored otherwise.
    pub omega: f64,
}

impl SignalSpec {
    pub fn new(kind: SignalKind, amplitude: f64, t_start: f64, t_end: f64, sample_rate: f64) -> Self {
        Self { kind, amplitude, t_start, t_end, sample_rate, omega: std::f64::consts::PI }
    }

    /// Domain and rate used for the template functions and the other
    /// named signals.
    pub fn standard(kind: SignalKind, amplitude: f64) -> Self {
        match kind {
            SignalKind::Wood1 | SignalKind::Wood2 => Self::new(kind, amplitude, 3.1, 20.4, 20.0),
            SignalKind::Wood3 => Self::new(kind, amplitude, -10.0, 10.0, 20.0),
            SignalKind::Quasiperiodic => Self::new(kind, amplitude, 0.0, 15.0, 40.0),
            SignalKind::Sinusoid => Self::new(kind, amplitude, 0.0, 15.0, 40.0),
            SignalKind::LorenzX => Self::new(kind, amplitude, 187.505, 200.0, 200.0),
        }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_end > self.t_start) {
            return Err(Error::domain(format!(
                "signal domain [{}, {}] is empty",
                self.t_start, self.t_end
            )));
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(Error::domain("sample rate must be positive"));
        }
        if !self.amplitude.is_finite() || !self.omega.is_finite() {
            return Err(Error::domain("amplitude and frequency must be finite"));
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        grid_len(self.t_end - self.t_start, self.sample_rate)
    }
}

fn grid_len(span: f64, rate: f64) -> usize {
    (span * rate + 1e-9).floor() as usize + 1
}

pub fn generate(spec: &SignalSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let n = spec.sample_count();
    let values = if spec.kind == SignalKind::LorenzX {
        // integrate from t = 0 and keep the samples inside the domain
        if spec.t_start < 0.0 {
            return Err(Error::domain("Lorenz signal starts at t = 0"));
        }
        let skip = (spec.t_start * spec.sample_rate).round() as usize;
        let traj = lorenz_trajectory(&LorenzParams::default(), [1.0, 1.0, 1.0], 1.0 / spec.sample_rate, 1, skip + n)?;
        traj[skip..].iter().map(|s| spec.amplitude * s[0]).collect()
    } else {
        (0..n)
            .map(|k| {
                let t = spec.t_start + k as f64 / spec.sample_rate;
                spec.amplitude * spec.kind.eval(t, spec.omega).expect("closed form")
            })
            .collect()
    };
    TimeSeries::with_origin(values, spec.sample_rate, spec.t0_for_kind())
}

impl SignalSpec {
    fn t0_for_kind(&self) -> f64 {
        if self.kind == SignalKind::LorenzX {
            (self.t_start * self.sample_rate).round() / self.sample_rate
        } else {
            self.t_start
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorenzParams {
    pub sigma_l: f64,
    pub beta: f64,
    pub rho_l: f64,
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self { sigma_l: 10.0, beta: 8.0 / 3.0, rho_l: 181.0 }
    }
}

impl LorenzParams {
    fn derivative(&self, s: [f64; 3]) -> [f64; 3] {
        [
            self.sigma_l * (s[1] - s[0]),
            s[0] * (self.rho_l - s[2]) - s[1],
            s[0] * s[1] - self.beta * s[2],
        ]
    }
}

const LORENZ_BOUND: f64 = 1e8;

/// `count` states spaced `dt` apart starting with `initial`, each step made
/// of `substeps` classical Runge-Kutta steps.
pub fn lorenz_trajectory(
    params: &LorenzParams,
    initial: [f64; 3],
    dt: f64,
    substeps: usize,
    count: usize,
) -> Result<Vec<[f64; 3]>> {
    if ![params.sigma_l, params.beta, params.rho_l].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("Lorenz parameters must be finite"));
    }
    if !(dt.is_finite() && dt > 0.0) || substeps == 0 {
        return Err(Error::domain("step must be positive"));
    }
    let h = dt / substeps as f64;
    let axpy = |a: [f64; 3], k: [f64; 3], c: f64| [a[0] + c * k[0], a[1] + c * k[1], a[2] + c * k[2]];
    let mut s = initial;
    let mut out = Vec::with_capacity(count);
    for step in 0..count {
        if !s.iter().all(|v| v.is_finite() && v.abs() < LORENZ_BOUND) {
            return Err(Error::IntegrationOverflow { step });
        }
        out.push(s);
        for _ in 0..substeps {
            let k1 = params.derivative(s);
            let k2 = params.derivative(axpy(s, k1, h / 2.0));
            let k3 = params.derivative(axpy(s, k2, h / 2.0));
            let k4 = params.derivative(axpy(s, k3, h));
            for i in 0..3 {
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    Ok(out)
}

/// Last `keep_last` x-samples of a trajectory from (1, 1, 1) sampled at
/// `sample_rate` for `duration` seconds.
pub fn lorenz_x(params: &LorenzParams, sample_rate: f64, duration: f64, keep_last: usize) -> Result<TimeSeries> {
    lorenz_x_with(params, [1.0, 1.0, 1.0], 1, sample_rate, duration, keep_last)
}

/// [`lorenz_x`] with an explicit initial state and `substeps` integration
/// steps per sample.
pub fn lorenz_x_with(
    params: &LorenzParams,
    initial: [f64; 3],
    substeps: usize,
    sample_rate: f64,
    duration: f64,
    keep_last: usize,
) -> Result<TimeSeries> {
    if !(sample_rate.is_finite() && sample_rate > 0.0 && duration.is_finite() && duration > 0.0) {
        return Err(Error::domain("sample rate and duration must be positive"));
    }
    let total = grid_len(duration, sample_rate);
    if keep_last > total || keep_last == 0 {
        return Err(Error::domain(format!("cannot keep {keep_last} of {total} samples")));
    }
    let traj = lorenz_trajectory(params, initial, 1.0 / sample_rate, substeps, total)?;
    let first = total - keep_last;
    TimeSeries::with_origin(
        traj[first..].iter().map(|s| s[0]).collect(),
        sample_rate,
        first as f64 / sample_rate,
    )
}

/// Lorenz series used for the method comparisons: 200 Hz for 200 s, last
/// 2500 samples.
pub fn lorenz_reference() -> Result<TimeSeries> {
    lorenz_x(&LorenzParams::default(), 200.0, 200.0, 2500)
}

/// Noise standard deviation giving `snr_db` relative to the rms of the
/// mean-removed signal.
pub fn sigma_from_snr(signal: &TimeSeries, snr_db: f64) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::domain("SNR must be finite"));
    }
    let rms = signal.std_dev();
    if !(rms > 0.0) {
        return Err(Error::DegenerateSignal);
    }
    Ok(rms * 10f64.powf(-snr_db / 20.0))
}

pub fn add_noise(signal: &TimeSeries, model: &NoiseModel, seed: u64) -> Result<TimeSeries> {
    if signal.is_empty() {
        return Ok(signal.clone());
    }
    let eps = noise::sample(model, signal.len(), seed)?;
    signal.with_values(signal.values().iter().zip(eps.values()).map(|(s, e)| s + e).collect())
}
