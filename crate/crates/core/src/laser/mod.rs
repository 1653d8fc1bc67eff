//! Phase-diffusing laser source, delayed self-homodyne beat detection and
//! the photodetector band-pass.
//!
//! The field is modelled as a Wiener process in phase with increments of
//! variance `2π·Δν·dt` per step and a weak white amplitude jitter. Beating the
//! field against a copy delayed by `τ` yields
//! `v(t) = 2·ℰ(t)·ℰ(t+τ)·cos[φ(t) − φ(t+τ)]`, which is then band-limited by the
//! detector response.

mod field;
mod filter;
mod interferometer;
mod trig;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result};

pub use field::{chunk_seed, simulate_field, FieldGenerator, FieldTrajectory, FIELD_CHUNK_STEPS};
pub use filter::{bandpass_filter, BandPass, Biquad, FILTER_WARMUP_SAMPLES};
pub use interferometer::{beat_voltage, delay_steps, BeatStream};

/// Largest relative amplitude jitter for which the phase-only beat model holds.
pub const MAX_AMPLITUDE_NOISE_RMS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserParams {
    /// Full width of the Lorentzian optical line, Hz.
    pub linewidth_hz: f64,
    /// Relative RMS of the field amplitude jitter (dimensionless).
    pub amplitude_noise_rms: f64,
    pub seed: u64,
}

impl Default for LaserParams {
    fn default() -> Self {
        Self {
            linewidth_hz: 200e6,
            amplitude_noise_rms: 0.01,
            seed: 0,
        }
    }
}

impl LaserParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.linewidth_hz.is_finite() && self.linewidth_hz > 0.0) {
            return Err(invalid_param(format!(
                "linewidth_hz must be positive and finite, got {}",
                self.linewidth_hz
            )));
        }
        if !(self.amplitude_noise_rms >= 0.0 && self.amplitude_noise_rms < MAX_AMPLITUDE_NOISE_RMS)
        {
            return Err(invalid_param(format!(
                "amplitude_noise_rms must lie in [0, {MAX_AMPLITUDE_NOISE_RMS}), got {}",
                self.amplitude_noise_rms
            )));
        }
        Ok(())
    }

    /// `1/(π·Δν)`; panics never, but is meaningless for invalid params.
    pub fn coherence_time_s(&self) -> f64 {
        1.0 / (std::f64::consts::PI * self.linewidth_hz)
    }
}

/// Coherence time `τ_coh = 1/(π·Δν)` in seconds.
pub fn coherence_time(params: &LaserParams) -> Result<f64> {
    if !(params.linewidth_hz.is_finite() && params.linewidth_hz > 0.0) {
        return Err(invalid_param(format!(
            "linewidth_hz must be positive, got {}",
            params.linewidth_hz
        )));
    }
    Ok(params.coherence_time_s())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerParams {
    /// Optical delay of the long arm, seconds.
    pub delay_s: f64,
}

impl Default for InterferometerParams {
    fn default() -> Self {
        Self { delay_s: 10e-9 }
    }
}

/// Detector pass band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    pub low_cutoff_hz: f64,
    pub high_cutoff_hz: f64,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            low_cutoff_hz: 50e3,
            high_cutoff_hz: 1e9,
        }
    }
}

impl FilterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.low_cutoff_hz >= 0.0 && self.high_cutoff_hz > 0.0) {
            return Err(invalid_param(format!(
                "cutoffs must satisfy low >= 0 and high > 0, got {} / {}",
                self.low_cutoff_hz, self.high_cutoff_hz
            )));
        }
        if self.low_cutoff_hz >= self.high_cutoff_hz {
            return Err(invalid_param(format!(
                "low_cutoff_hz ({}) must be below high_cutoff_hz ({})",
                self.low_cutoff_hz, self.high_cutoff_hz
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherence_time_matches_reported_value() {
        let p = LaserParams::default();
        let t = coherence_time(&p).unwrap();
        assert!((t - 1.59e-9).abs() / 1.59e-9 < 0.005, "{t}");
    }

    #[test]
    fn coherence_time_identity_and_400mhz() {
        let p = LaserParams {
            linewidth_hz: 1.0 / std::f64::consts::PI,
            ..Default::default()
        };
        assert!((coherence_time(&p).unwrap() - 1.0).abs() < 1e-15);
        let p = LaserParams {
            linewidth_hz: 400e6,
            ..Default::default()
        };
        assert!((coherence_time(&p).unwrap() - 0.7958e-9).abs() < 0.0001e-9);
    }

    #[test]
    fn nonpositive_linewidth_rejected() {
        for lw in [0.0, -1.0, f64::NAN] {
            let p = LaserParams {
                linewidth_hz: lw,
                ..Default::default()
            };
            assert!(coherence_time(&p).is_err());
            assert!(p.validate().is_err());
        }
    }

    #[test]
    fn amplitude_noise_bound() {
        let mut p = LaserParams::default();
        p.amplitude_noise_rms = 0.1;
        assert!(p.validate().is_err());
        p.amplitude_noise_rms = 0.0;
        assert!(p.validate().is_ok());
    }

    #[test]
    fn filter_params_ordering() {
        let fp = FilterParams {
            low_cutoff_hz: 1e9,
            high_cutoff_hz: 50e3,
        };
        assert!(fp.validate().is_err());
        assert!(FilterParams::default().validate().is_ok());
    }
}
