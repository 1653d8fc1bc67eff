//! Power spectral density and autocorrelation estimates.
//!
//! Both estimators remove the block mean first, so the spectrum carries the
//! signal's (population) variance and the autocorrelation is the
//! autocovariance normalized at lag 0.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, Error, Result};

/// One-sided power spectral density in power per Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub freqs_hz: Vec<f64>,
    pub psd: Vec<f64>,
    pub fs_hz: f64,
    /// Length of the transform the bins came from.
    pub n_samples: usize,
}

impl SpectrumEstimate {
    pub fn bin_width_hz(&self) -> f64 {
        self.fs_hz / self.n_samples as f64
    }

    /// `Σ psd·Δf`.
    pub fn total_power(&self) -> f64 {
        self.psd.iter().sum::<f64>() * self.bin_width_hz()
    }

    /// Whether one-sided bin `k` was folded from a `±f` pair.
    fn is_doubled(&self, k: usize) -> bool {
        k != 0 && 2 * k != self.n_samples
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfEstimate {
    pub lags_s: Vec<f64>,
    /// Normalized so `acf[0] = 1`.
    pub acf: Vec<f64>,
}

impl AcfEstimate {
    /// Value at the lag nearest to `lag_s`.
    pub fn at(&self, lag_s: f64) -> Option<f64> {
        let dt = *self.lags_s.get(1)?;
        self.acf.get((lag_s / dt).round() as usize).copied()
    }
}

fn centred(signal: &[f64]) -> Vec<f64> {
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    signal.iter().map(|x| x - mean).collect()
}

fn check_rate(fs_hz: f64) -> Result<()> {
    if fs_hz > 0.0 && fs_hz.is_finite() {
        Ok(())
    } else {
        Err(invalid_input(format!("sample rate must be positive, got {fs_hz}")))
    }
}

fn forward_power(x: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf.iter().map(|c| c.norm_sqr()).collect()
}

fn one_sided(two_sided: &[f64], fs_hz: f64, n_transform: usize, scale: f64) -> SpectrumEstimate {
    let bins = n_transform / 2 + 1;
    let df = fs_hz / n_transform as f64;
    let mut s = SpectrumEstimate {
        freqs_hz: (0..bins).map(|k| k as f64 * df).collect(),
        psd: two_sided[..bins].iter().map(|p| p * scale).collect(),
        fs_hz,
        n_samples: n_transform,
    };
    for k in 0..bins {
        if s.is_doubled(k) {
            s.psd[k] *= 2.0;
        }
    }
    s
}

/// Unwindowed periodogram of the whole block; `Σ psd·Δf` equals the block variance.
pub fn psd_periodogram(signal: &[f64], fs_hz: f64) -> Result<SpectrumEstimate> {
    if signal.len() < 2 {
        return Err(invalid_input("periodogram needs at least 2 samples"));
    }
    check_rate(fs_hz)?;
    let n = signal.len();
    let power = forward_power(&centred(signal));
    Ok(one_sided(&power, fs_hz, n, 1.0 / (n as f64 * fs_hz)))
}

/// Averaged periodogram over Hann-windowed segments with 50% overlap.
///
/// Lower variance than [`psd_periodogram`] at the cost of resolution; meant
/// for display, not for the autocorrelation path.
pub fn welch_psd(signal: &[f64], fs_hz: f64, segment_len: usize) -> Result<SpectrumEstimate> {
    if segment_len < 4 || segment_len > signal.len() {
        return Err(invalid_input(format!(
            "segment length {segment_len} must be between 4 and the signal length {}",
            signal.len()
        )));
    }
    check_rate(fs_hz)?;
    let x = centred(signal);
    let window: Vec<f64> = (0..segment_len)
        .map(|i| {
            let t = std::f64::consts::PI * i as f64 / segment_len as f64;
            t.sin().powi(2)
        })
        .collect();
    let w_power: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::new().plan_fft_forward(segment_len);
    let hop = segment_len / 2;
    let mut acc = vec![0.0; segment_len];
    let mut segments = 0usize;
    let mut buf = vec![Complex::new(0.0, 0.0); segment_len];
    let mut start = 0;
    while start + segment_len <= x.len() {
        for ((b, &v), &w) in buf.iter_mut().zip(&x[start..]).zip(&window) {
            *b = Complex::new(v * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, c) in acc.iter_mut().zip(&buf) {
            *a += c.norm_sqr();
        }
        segments += 1;
        start += hop;
    }
    let scale = 1.0 / (fs_hz * w_power * segments as f64);
    Ok(one_sided(&acc, fs_hz, segment_len, scale))
}

/// Circular autocorrelation from a periodogram by inverse transform of the
/// two-sided spectrum; lags `0..=n/2`.
pub fn acf_from_psd(spec: &SpectrumEstimate) -> Result<AcfEstimate> {
    let n = spec.n_samples;
    if n < 2 || spec.psd.len() != n / 2 + 1 {
        return Err(invalid_input(format!(
            "spectrum has {} bins, inconsistent with a {n}-sample transform",
            spec.psd.len()
        )));
    }
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for (k, &p) in spec.psd.iter().enumerate() {
        let v = if spec.is_doubled(k) { 0.5 * p } else { p };
        buf[k] = Complex::new(v, 0.0);
        if k != 0 {
            buf[n - k] = Complex::new(v, 0.0);
        }
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let r0 = buf[0].re;
    if !(r0 > 0.0) {
        return Err(Error::DegenerateVariance("spectrum carries no power".into()));
    }
    let lags = n / 2 + 1;
    Ok(AcfEstimate {
        lags_s: (0..lags).map(|m| m as f64 / spec.fs_hz).collect(),
        acf: buf[..lags].iter().map(|c| c.re / r0).collect(),
    })
}

/// Direct `O(n·max_lag)` circular autocorrelation, normalized at lag 0.
pub fn acf_direct(signal: &[f64], max_lag: usize, fs_hz: f64) -> Result<AcfEstimate> {
    let n = signal.len();
    if max_lag >= n {
        return Err(invalid_input(format!("max_lag {max_lag} must be below the length {n}")));
    }
    check_rate(fs_hz)?;
    let x = centred(signal);
    let r = |m: usize| -> f64 { (0..n).map(|i| x[i] * x[(i + m) % n]).sum::<f64>() };
    let r0 = r(0);
    if !(r0 > 0.0) {
        return Err(Error::DegenerateVariance("constant signal has no autocorrelation".into()));
    }
    Ok(AcfEstimate {
        lags_s: (0..=max_lag).map(|m| m as f64 / fs_hz).collect(),
        acf: (0..=max_lag).map(|m| r(m) / r0).collect(),
    })
}
