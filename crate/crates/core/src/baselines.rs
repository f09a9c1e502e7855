//! Comparison methods: persistent-entropy labeling, a residual bootstrap on
//! the bottleneck distance, and two residual-based noise-level estimates
//! (Butterworth low-pass and downsampled cubic spline).

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::{bottleneck_distance, sublevel_persistence, PersistenceDiagram};
use crate::rng::{self, derive_seed};
use crate::series::{population_std, TimeSeries};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Signal,
    Noise,
}

/// Labels pairs by their share of the total lifetime. With
/// `p_i = l_i / sum(l)` and perplexity `P = exp(-sum p_i ln p_i)`, pair `i`
/// is signal iff `p_i > 1 / P`. Labels follow the diagram's pair order.
pub fn persistent_entropy_separation(dgm: &PersistenceDiagram) -> Result<Vec<Label>> {
    let lifetimes = dgm.lifetimes();
    if lifetimes.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    Ok(entropy_labels(&lifetimes))
}

/// The entropy rule on a bare list of lifetimes.
pub fn entropy_labels(lifetimes: &[f64]) -> Vec<Label> {
    let total: f64 = lifetimes.iter().sum();
    if !(total > 0.0) {
        return vec![Label::Noise; lifetimes.len()];
    }
    let entropy: f64 = lifetimes
        .iter()
        .map(|l| l / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    let threshold = (-entropy).exp();
    lifetimes
        .iter()
        .map(|l| if l / total > threshold { Label::Signal } else { Label::Noise })
        .collect()
}

fn fft_pair(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut planner = FftPlanner::new();
    (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
}

fn bin_frequency(k: usize, n: usize, rate: f64) -> f64 {
    k.min(n - k) as f64 * rate / n as f64
}

/// Zero-phase low-pass: every FFT bin is scaled by the Butterworth magnitude
/// `1 / sqrt(1 + (f / fc)^(2 order))`.
///
/// The transform runs on the even extension `x0 .. x(n-1), x(n-1) .. x0`,
/// which is continuous across the wrap-around, so a series whose two ends
/// differ does not ring near its boundaries.
pub fn butterworth_fft_filter(series: &TimeSeries, cutoff_hz: f64, order: u32) -> Result<TimeSeries> {
    if !(cutoff_hz.is_finite() && cutoff_hz > 0.0) || order == 0 {
        return Err(Error::domain(format!(
            "filter needs a positive cutoff and order >= 1, got {cutoff_hz} Hz, order {order}"
        )));
    }
    series.require_len(1)?;
    let n = series.len();
    let m = 2 * n;
    let (fwd, inv) = fft_pair(m);
    let mut buf: Vec<Complex<f64>> = series
        .values()
        .iter()
        .chain(series.values().iter().rev())
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    fwd.process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let f = bin_frequency(k, m, series.sample_rate());
        *c *= 1.0 / (1.0 + (f / cutoff_hz).powi(2 * order as i32)).sqrt();
    }
    inv.process(&mut buf);
    series.with_values(buf[..n].iter().map(|c| c.re / m as f64).collect())
}

/// Power at bins `1..=n` of the even extension of the mean-removed series,
/// with the bin spacing in Hz.
fn even_periodogram(series: &TimeSeries) -> (Vec<f64>, f64) {
    let n = series.len();
    let m = 2 * n;
    let mean = series.mean();
    let mut buf: Vec<Complex<f64>> = series
        .values()
        .iter()
        .chain(series.values().iter().rev())
        .map(|&v| Complex::new(v - mean, 0.0))
        .collect();
    fft_pair(m).0.process(&mut buf);
    (buf[1..=n].iter().map(|c| c.norm_sqr()).collect(), series.sample_rate() / m as f64)
}

/// Frequency of the largest non-DC FFT magnitude of the mean-removed series.
pub fn dominant_frequency(series: &TimeSeries) -> Result<f64> {
    series.require_len(4)?;
    let (power, df) = even_periodogram(series);
    let k = (0..power.len())
        .max_by(|&a, &b| power[a].total_cmp(&power[b]).then(b.cmp(&a)))
        .expect("n >= 4");
    if power[k] == 0.0 {
        return Err(Error::DegenerateSignal);
    }
    Ok((k + 1) as f64 * df)
}

/// Lowest frequency at which the smoothed periodogram falls to twice the
/// white-noise floor, the floor being the mean power over the upper half of
/// the band. Above it the series is indistinguishable from white noise.
/// Falls back to a quarter of the sampling rate when the floor is never
/// reached.
pub fn noise_floor_frequency(series: &TimeSeries) -> Result<f64> {
    series.require_len(16)?;
    let (power, df) = even_periodogram(series);
    let n = power.len();
    let upper = &power[n / 2..];
    let floor = upper.iter().sum::<f64>() / upper.len() as f64;
    if !(floor > 0.0) {
        return Ok(series.sample_rate() / 4.0);
    }
    let half = (n / 200).max(1);
    let mut prefix = vec![0.0; n + 1];
    for (i, p) in power.iter().enumerate() {
        prefix[i + 1] = prefix[i] + p;
    }
    let k = (0..n / 2).find(|&k| {
        let lo = k.saturating_sub(half);
        let hi = (k + half + 1).min(n);
        (prefix[hi] - prefix[lo]) / ((hi - lo) as f64) < 2.0 * floor
    });
    Ok(k.map_or(series.sample_rate() / 4.0, |k| (k + 1) as f64 * df))
}

/// How the low-pass cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "hz", rename_all = "snake_case")]
pub enum FilterCutoff {
    /// [`noise_floor_frequency`]
    NoiseFloor,
    /// Twice [`dominant_frequency`].
    TwiceDominant,
    Fixed(f64),
}

impl Default for FilterCutoff {
    fn default() -> Self {
        FilterCutoff::NoiseFloor
    }
}

impl FilterCutoff {
    pub fn resolve(self, series: &TimeSeries) -> Result<f64> {
        match self {
            FilterCutoff::NoiseFloor => noise_floor_frequency(series),
            FilterCutoff::TwiceDominant => Ok(2.0 * dominant_frequency(series)?),
            FilterCutoff::Fixed(hz) => Ok(hz),
        }
    }
}

pub const DEFAULT_FILTER_ORDER: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub percentile: f64,
    pub filter_cutoff: FilterCutoff,
    pub filter_order: u32,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            resamples: 1000,
            percentile: 0.95,
            filter_cutoff: FilterCutoff::default(),
            filter_order: DEFAULT_FILTER_ORDER,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    /// Lifetime threshold, twice the distance percentile.
    pub threshold: f64,
    pub percentile_distance: f64,
    pub filter_cutoff_hz: f64,
    /// Bottleneck distances in resample order.
    pub distances: Vec<f64>,
}

/// Residual bootstrap of the bottleneck distance between the diagram of the
/// data and diagrams of `filtered + resampled residuals`.
///
/// The two samples at each end of every resample are kept equal to the data.
/// Fixing the end values alone is not enough: the direction of the first and
/// last edge decides how the boundary extends to infinity, and flipping it
/// changes a large persistence pair.
pub fn bootstrap_cutoff(series: &TimeSeries, cfg: &BootstrapConfig) -> Result<BootstrapResult> {
    if cfg.resamples == 0 || !(cfg.percentile > 0.0 && cfg.percentile < 1.0) {
        return Err(Error::domain("bootstrap needs at least one resample and a percentile in (0, 1)"));
    }
    series.require_len(2)?;
    let cutoff = cfg.filter_cutoff.resolve(series)?;
    let smooth = butterworth_fft_filter(series, cutoff, cfg.filter_order)?;
    let x = series.values();
    let s = smooth.values();
    let residuals: Vec<f64> = s.iter().zip(x).map(|(s, x)| s - x).collect();
    let base = sublevel_persistence(series)?;
    let n = x.len();
    let distances = (0..cfg.resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(derive_seed(cfg.seed, i as u64));
            let mut values: Vec<f64> = s.iter().map(|&si| si + residuals[rng.gen_range(0..n)]).collect();
            for i in [0, 1, n - 2, n - 1] {
                values[i] = x[i];
            }
            let dgm = sublevel_persistence(&series.with_values(values)?)?;
            Ok(bottleneck_distance(&base, &dgm))
        })
        .collect::<Result<Vec<f64>>>()?;
    let percentile_distance = percentile(&distances, cfg.percentile);
    Ok(BootstrapResult {
        threshold: 2.0 * percentile_distance,
        percentile_distance,
        filter_cutoff_hz: cutoff,
        distances,
    })
}

/// Linear-interpolation percentile (`q` in [0, 1]) of a non-empty sample.
pub(crate) fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Standard deviation of the residual after the Butterworth low-pass.
pub fn lowpass_residual_sigma(series: &TimeSeries, cutoff: FilterCutoff, order: u32) -> Result<f64> {
    series.require_len(16)?;
    let cutoff = cutoff.resolve(series)?;
    let smooth = butterworth_fft_filter(series, cutoff, order)?;
    let res: Vec<f64> = series.values().iter().zip(smooth.values()).map(|(x, s)| x - s).collect();
    Ok(population_std(&res))
}

/// First lag at which the sample autocorrelation drops below `1/e`, or
/// `None` if it never does before `len / 2`.
pub fn autocorrelation_delay(values: &[f64]) -> Option<usize> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let c0: f64 = c.iter().map(|v| v * v).sum();
    if c0 == 0.0 {
        return None;
    }
    let threshold = (-1.0f64).exp();
    (1..n / 2).find(|&lag| {
        let ck: f64 = c[..n - lag].iter().zip(&c[lag..]).map(|(a, b)| a * b).sum();
        ck / c0 < threshold
    })
}

/// Largest downsampling step whose downsampled series still has an
/// autocorrelation delay of at least two samples; at least 2.
pub fn spline_downsampling_step(series: &TimeSeries) -> Result<usize> {
    series.require_len(16)?;
    let x = series.values();
    let mut best = 2;
    for k in 2..=x.len() / 8 {
        let sub: Vec<f64> = x.iter().step_by(k).copied().collect();
        match autocorrelation_delay(&sub) {
            Some(d) if d >= 2 => best = k,
            None => best = k,
            Some(_) => break,
        }
    }
    Ok(best)
}

/// Natural cubic spline through `(xs, ys)`, `xs` strictly increasing.
#[derive(Debug, Clone)]
pub struct NaturalSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("spline needs at least two strictly increasing knots"));
        }
        // second derivatives by the Thomas algorithm, zero at both ends
        let mut m = vec![0.0; n];
        if n > 2 {
            let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                diag[i] = 2.0 * (h[i] + h[i + 1]);
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h[i + 1] - (ys[i + 1] - ys[i]) / h[i]);
            }
            for i in 1..k {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * h[i];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - h[i + 1] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { xs, ys, m })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// Standard deviation of the residual of a natural cubic spline through a
/// downsampled copy of the series (see [`spline_downsampling_step`]),
/// taken over the samples that are not knots.
pub fn spline_residual_sigma(series: &TimeSeries) -> Result<f64> {
    let k = spline_downsampling_step(series)?;
    let x = series.values();
    let n = x.len();
    let mut knots: Vec<usize> = (0..n).step_by(k).collect();
    if *knots.last().expect("n >= 16") != n - 1 {
        knots.push(n - 1);
    }
    let spline = NaturalSpline::new(
        knots.iter().map(|&i| i as f64).collect(),
        knots.iter().map(|&i| x[i]).collect(),
    )?;
    let mut is_knot = vec![false; n];
    for &i in &knots {
        is_knot[i] = true;
    }
    let res: Vec<f64> = (0..n).filter(|&i| !is_knot[i]).map(|i| x[i] - spline.eval(i as f64)).collect();
    Ok(population_std(&res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{self, NoiseModel};
    use crate::persistence::PersistencePair;

    fn dgm_with(lifetimes: &[f64]) -> PersistenceDiagram {
        let pairs = lifetimes
            .iter()
            .enumerate()
            .map(|(i, &l)| PersistencePair { birth: 0.0, death: l, birth_index: i, death_index: i })
            .collect();
        PersistenceDiagram::new(pairs, f64::NEG_INFINITY, None, 100)
    }

    fn sine(freq: f64, rate: f64, n: usize) -> TimeSeries {
        let v = (0..n).map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / rate).sin()).collect();
        TimeSeries::new(v, rate).unwrap()
    }

    fn amplitude(s: &TimeSeries) -> f64 {
        // rms of the central half, away from wrap-around effects
        let v = &s.values()[s.len() / 4..3 * s.len() / 4];
        (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt() * 2f64.sqrt()
    }

    #[test]
    fn entropy_rule() {
        let equal = persistent_entropy_separation(&dgm_with(&[2.0; 6])).unwrap();
        assert!(equal.iter().all(|&l| l == Label::Noise));
        let labels = persistent_entropy_separation(&dgm_with(&[100.0, 1.0, 1.0, 1.0, 1.0])).unwrap();
        assert_eq!(labels, vec![Label::Signal, Label::Noise, Label::Noise, Label::Noise, Label::Noise]);
        assert!(matches!(persistent_entropy_separation(&dgm_with(&[])), Err(Error::EmptyDiagram)));
    }

    #[test]
    fn filter_passband_and_stopband() {
        let c = TimeSeries::new(vec![3.5; 64], 10.0).unwrap();
        assert!(butterworth_fft_filter(&c, 1.0, 2).unwrap().values().iter().all(|v| (v - 3.5).abs() < 1e-12));
        // integer number of periods so the FFT sees a pure tone
        let low = sine(1.0, 1000.0, 4000);
        let out = butterworth_fft_filter(&low, 20.0, 2).unwrap();
        assert!((amplitude(&out) - 1.0).abs() < 0.01);
        let high = sine(100.0, 1000.0, 4000);
        let out = butterworth_fft_filter(&high, 10.0, 2).unwrap();
        // gain 1 / sqrt(1 + 10^4) < 0.01
        assert!(amplitude(&out) <= 0.01);
        assert!(butterworth_fft_filter(&low, 0.0, 2).is_err());
        assert!(butterworth_fft_filter(&low, 1.0, 0).is_err());
    }

    #[test]
    fn no_ringing_at_mismatched_ends() {
        let ramp = TimeSeries::new((0..500).map(|i| i as f64 * 0.1).collect(), 100.0).unwrap();
        let out = butterworth_fft_filter(&ramp, 10.0, 4).unwrap();
        let worst = out.values().iter().zip(ramp.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 0.1, "{worst}");
    }

    #[test]
    fn dominant_frequency_of_tone() {
        let s = sine(2.5, 100.0, 1000);
        assert!((dominant_frequency(&s).unwrap() - 2.5).abs() < 0.06);
    }

    #[test]
    fn noise_floor_sits_above_tone() {
        let s = sine(2.0, 200.0, 4000);
        let x = crate::signals::add_noise(&s, &NoiseModel::gaussian(0.05, 0.0).unwrap(), 2).unwrap();
        let fc = noise_floor_frequency(&x).unwrap();
        assert!(fc > 2.0 && fc < 10.0, "{fc}");
    }

    #[test]
    fn bootstrap_zero_noise_and_shift() {
        let s = sine(1.0, 50.0, 200);
        let cfg = BootstrapConfig { resamples: 20, filter_cutoff: FilterCutoff::Fixed(5.0), seed: 4, ..Default::default() };
        let flat = TimeSeries::new(vec![2.0; 200], 50.0).unwrap();
        let r = bootstrap_cutoff(&flat, &cfg).unwrap();
        assert!(r.threshold < 1e-12, "{}", r.threshold);
        // a clean tone leaves only a small residual near the ends, where the
        // mirrored extension has a slope discontinuity
        let r = bootstrap_cutoff(&s, &cfg).unwrap();
        assert!(r.threshold < 0.1, "{}", r.threshold);

        let x = crate::signals::add_noise(&s, &NoiseModel::gaussian(0.2, 0.0).unwrap(), 3).unwrap();
        let a = bootstrap_cutoff(&x, &cfg).unwrap();
        let b = bootstrap_cutoff(&x, &cfg).unwrap();
        assert_eq!(a, b);
        let shifted = bootstrap_cutoff(&x.map(|v| v + 7.0).unwrap(), &cfg).unwrap();
        assert!((shifted.threshold - a.threshold).abs() < 1e-9);
        assert!(a.threshold > 0.0);
    }

    #[test]
    fn percentile_interpolates() {
        assert_eq!(percentile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert!((percentile(&[0.0, 10.0], 0.95) - 9.5).abs() < 1e-12);
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let sp = NaturalSpline::new(xs, ys).unwrap();
        assert!((sp.eval(4.5) - 10.0).abs() < 1e-12);
        assert!(NaturalSpline::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn spline_second_derivative_vanishes_at_ends() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.7).collect();
        let ys: Vec<f64> = xs.iter().map(|x: &f64| x.sin()).collect();
        let sp = NaturalSpline::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((sp.eval(*x) - y).abs() < 1e-12);
        }
        let h = 1e-4;
        let d2 = (sp.eval(2.0 * h) - 2.0 * sp.eval(h) + sp.eval(0.0)) / (h * h);
        assert!(d2.abs() < 1e-2, "{d2}");
    }

    #[test]
    fn residual_sigmas_on_noise_and_smooth_signal() {
        let eps = noise::sample(&NoiseModel::gaussian(1.0, 0.0).unwrap(), 10_000, 8).unwrap();
        let low = lowpass_residual_sigma(&eps, FilterCutoff::Fixed(0.01), 2).unwrap();
        assert!((0.9..=1.05).contains(&low), "{low}");
        let spl = spline_residual_sigma(&eps).unwrap();
        assert!(spl >= 1.0, "{spl}");

        let smooth = sine(1.0, 200.0, 2000);
        assert!(lowpass_residual_sigma(&smooth, FilterCutoff::default(), 4).unwrap() < 0.05);
        assert!(lowpass_residual_sigma(&smooth, FilterCutoff::TwiceDominant, 4).unwrap() < 0.05);
        let auto = lowpass_residual_sigma(&eps, FilterCutoff::default(), 4).unwrap();
        assert!((0.9..=1.05).contains(&auto), "{auto}");
        assert!(spline_residual_sigma(&smooth).unwrap() < 0.05);
    }

    #[test]
    fn acf_delay_of_noise_and_sine() {
        let eps = noise::sample(&NoiseModel::gaussian(1.0, 0.0).unwrap(), 5000, 1).unwrap();
        assert_eq!(autocorrelation_delay(eps.values()), Some(1));
        let s = sine(1.0, 100.0, 1000);
        // cos(2 pi lag / 100) < 1/e first at lag 20
        assert_eq!(autocorrelation_delay(s.values()), Some(20));
    }
}
