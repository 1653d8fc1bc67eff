use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::FilterParams;
use crate::error::{invalid_input, invalid_param, Result};

/// Samples discarded after the detector filter before any output is used.
pub const FILTER_WARMUP_SAMPLES: usize = 1000;

const MIN_FILTER_INPUT: usize = 8;

/// Second-order IIR section, transposed direct form II, zero initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    s1: f64,
    s2: f64,
}

impl Biquad {
    /// Normalized coefficients `b0 + b1 z⁻¹ + b2 z⁻²` over `1 + a1 z⁻¹ + a2 z⁻²`.
    pub fn new(b: [f64; 3], a: [f64; 2]) -> Self {
        Self {
            b0: b[0],
            b1: b[1],
            b2: b[2],
            a1: a[0],
            a2: a[1],
            s1: 0.0,
            s2: 0.0,
        }
    }

    fn warp(cutoff_hz: f64, fs_hz: f64) -> (f64, f64) {
        let w0 = 2.0 * PI * cutoff_hz / fs_hz;
        (w0.cos(), w0.sin() / (2.0 * FRAC_1_SQRT_2))
    }

    /// Butterworth (Q = 1/√2) low-pass via the bilinear transform with prewarping.
    pub fn low_pass(cutoff_hz: f64, fs_hz: f64) -> Self {
        let (cw, alpha) = Self::warp(cutoff_hz, fs_hz);
        let a0 = 1.0 + alpha;
        let b1 = (1.0 - cw) / a0;
        Self::new([b1 / 2.0, b1, b1 / 2.0], [-2.0 * cw / a0, (1.0 - alpha) / a0])
    }

    /// Butterworth (Q = 1/√2) high-pass via the bilinear transform with prewarping.
    pub fn high_pass(cutoff_hz: f64, fs_hz: f64) -> Self {
        let (cw, alpha) = Self::warp(cutoff_hz, fs_hz);
        let a0 = 1.0 + alpha;
        let b1 = -(1.0 + cw) / a0;
        Self::new(
            [-b1 / 2.0, b1, -b1 / 2.0],
            [-2.0 * cw / a0, (1.0 - alpha) / a0],
        )
    }

    #[inline(always)]
    pub fn process(&mut self, x: f64) -> f64 {
        let y = self.b0 * x + self.s1;
        self.s1 = self.b1 * x - self.a1 * y + self.s2;
        self.s2 = self.b2 * x - self.a2 * y;
        y
    }

    pub fn reset(&mut self) {
        self.s1 = 0.0;
        self.s2 = 0.0;
    }

    /// `|H(e^{jω})|` at `freq_hz`.
    pub fn magnitude(&self, freq_hz: f64, fs_hz: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / fs_hz;
        let (c1, s1) = (w.cos(), w.sin());
        let (c2, s2) = ((2.0 * w).cos(), (2.0 * w).sin());
        let nr = self.b0 + self.b1 * c1 + self.b2 * c2;
        let ni = -(self.b1 * s1 + self.b2 * s2);
        let dr = 1.0 + self.a1 * c1 + self.a2 * c2;
        let di = -(self.a1 * s1 + self.a2 * s2);
        ((nr * nr + ni * ni) / (dr * dr + di * di)).sqrt()
    }
}

/// Detector response: high-pass at the low cutoff, then low-pass at the high
/// cutoff when it lies below Nyquist.
#[derive(Debug, Clone)]
pub struct BandPass {
    high_pass: Option<Biquad>,
    low_pass: Option<Biquad>,
}

impl BandPass {
    /// A zero `low_cutoff_hz` disables the high-pass section.
    pub fn new(fp: &FilterParams, fs_hz: f64) -> Result<Self> {
        fp.validate()?;
        if !(fs_hz.is_finite() && fs_hz > 0.0) {
            return Err(invalid_param(format!("fs_hz must be positive, got {fs_hz}")));
        }
        let nyquist = fs_hz / 2.0;
        if fp.low_cutoff_hz >= nyquist {
            return Err(invalid_param(format!(
                "high-pass cutoff {} Hz must be below Nyquist ({nyquist} Hz)",
                fp.low_cutoff_hz
            )));
        }
        let high_pass = (fp.low_cutoff_hz > 0.0).then(|| Biquad::high_pass(fp.low_cutoff_hz, fs_hz));
        let low_pass =
            (fp.high_cutoff_hz < nyquist).then(|| Biquad::low_pass(fp.high_cutoff_hz, fs_hz));
        Ok(Self {
            high_pass,
            low_pass,
        })
    }

    #[inline(always)]
    pub fn process(&mut self, x: f64) -> f64 {
        let mut y = x;
        if let Some(hp) = &mut self.high_pass {
            y = hp.process(y);
        }
        if let Some(lp) = &mut self.low_pass {
            y = lp.process(y);
        }
        y
    }

    pub fn process_in_place(&mut self, signal: &mut [f64]) {
        match (&mut self.high_pass, &mut self.low_pass) {
            (Some(hp), Some(lp)) => signal.iter_mut().for_each(|x| *x = lp.process(hp.process(*x))),
            (Some(hp), None) => signal.iter_mut().for_each(|x| *x = hp.process(*x)),
            (None, Some(lp)) => signal.iter_mut().for_each(|x| *x = lp.process(*x)),
            (None, None) => {}
        }
    }

    pub fn magnitude(&self, freq_hz: f64, fs_hz: f64) -> f64 {
        [self.high_pass, self.low_pass]
            .iter()
            .flatten()
            .map(|s| s.magnitude(freq_hz, fs_hz))
            .product()
    }
}

/// Applies the detector band-pass to a whole block (zero initial state).
pub fn bandpass_filter(signal: &[f64], fs_hz: f64, fp: &FilterParams) -> Result<Vec<f64>> {
    if signal.len() < MIN_FILTER_INPUT {
        return Err(invalid_input(format!(
            "band-pass needs at least {MIN_FILTER_INPUT} samples, got {}",
            signal.len()
        )));
    }
    let mut bp = BandPass::new(fp, fs_hz)?;
    let mut out = signal.to_vec();
    bp.process_in_place(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Analog Butterworth magnitude at the prewarped frequency: what the
    /// bilinear transform maps onto the unit circle.
    fn analog_butterworth(f: f64, fc: f64, fs: f64, high: bool) -> f64 {
        let r = (PI * f / fs).tan() / (PI * fc / fs).tan();
        let r4 = r.powi(4);
        if high {
            (r4 / (1.0 + r4)).sqrt()
        } else {
            (1.0 / (1.0 + r4)).sqrt()
        }
    }

    fn steady_state_gain(fp: &FilterParams, fs: f64, f: f64, settle: usize, measure: usize) -> f64 {
        let sig: Vec<f64> = (0..settle + measure)
            .map(|i| (2.0 * PI * f * i as f64 / fs).sin())
            .collect();
        let out = bandpass_filter(&sig, fs, fp).unwrap();
        let rms = |s: &[f64]| (s.iter().map(|x| x * x).sum::<f64>() / s.len() as f64).sqrt();
        rms(&out[settle..]) / rms(&sig[settle..])
    }

    #[test]
    fn dc_is_rejected() {
        let x = vec![5.0; 100_000];
        let y = bandpass_filter(&x, 10e9, &FilterParams::default()).unwrap();
        assert_eq!(y.len(), x.len());
        // 50 kHz high-pass at 10 GHz settles slowly; use a faster corner for the block length.
        let fp = FilterParams {
            low_cutoff_hz: 50e6,
            high_cutoff_hz: 1e9,
        };
        let y = bandpass_filter(&x, 10e9, &fp).unwrap();
        let tail = &y[FILTER_WARMUP_SAMPLES..];
        let m = tail.iter().sum::<f64>() / tail.len() as f64;
        assert!(m.abs() < 1e-3, "mean {m}");
    }

    #[test]
    fn coefficients_match_analog_prototype() {
        let fs = 10e9;
        let hp = Biquad::high_pass(50e3, fs);
        let lp = Biquad::low_pass(1e9, fs);
        for f in [1e3, 50e3, 1e6, 1e8, 1e9, 3e9] {
            let a = hp.magnitude(f, fs);
            let b = analog_butterworth(f, 50e3, fs, true);
            // Near DC the direct evaluation cancels to ~1e-4 relative.
            assert!((a - b).abs() < 1e-3 * b, "hp at {f}: {a} vs {b}");
            let a = lp.magnitude(f, fs);
            let b = analog_butterworth(f, 1e9, fs, false);
            assert!((a - b).abs() < 1e-9, "lp at {f}: {a} vs {b}");
        }
        assert!((hp.magnitude(50e3, fs) - FRAC_1_SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn mid_band_amplitude_preserved() {
        let fp = FilterParams::default();
        let fs = 10e9;
        let mid = (fp.low_cutoff_hz * fp.high_cutoff_hz).sqrt();
        let oracle = analog_butterworth(mid, fp.low_cutoff_hz, fs, true)
            * analog_butterworth(mid, fp.high_cutoff_hz, fs, false);
        assert!(oracle > 0.95);
        let g = steady_state_gain(&fp, fs, mid, 400_000, 141_421);
        assert!((g - oracle).abs() < 0.01, "gain {g} vs {oracle}");
        assert!((g - 1.0).abs() < 0.05);
    }

    #[test]
    fn far_below_cutoff_is_attenuated() {
        // Scaled band so a full period of low_cutoff/100 fits in the block.
        let fs = 1e6;
        let fp = FilterParams {
            low_cutoff_hz: 1e3,
            high_cutoff_hz: 100e3,
        };
        let f = fp.low_cutoff_hz / 100.0;
        let oracle_db = 20.0 * analog_butterworth(f, fp.low_cutoff_hz, fs, true).log10();
        assert!(oracle_db < -30.0);
        let g = steady_state_gain(&fp, fs, f, 200_000, 400_000);
        let db = 20.0 * g.log10();
        assert!(db <= -30.0, "attenuation {db} dB");
    }

    #[test]
    fn invalid_configurations() {
        assert!(bandpass_filter(&[1.0; 7], 10e9, &FilterParams::default()).is_err());
        let fp = FilterParams {
            low_cutoff_hz: 6e9,
            high_cutoff_hz: 7e9,
        };
        assert!(bandpass_filter(&[1.0; 100], 10e9, &fp).is_err());
    }

    #[test]
    fn high_cutoff_above_nyquist_skips_low_pass() {
        let fp = FilterParams {
            low_cutoff_hz: 50e3,
            high_cutoff_hz: 1e9,
        };
        let bp = BandPass::new(&fp, 1e9).unwrap();
        assert!(bp.low_pass.is_none());
        assert!(bp.high_pass.is_some());
    }
}
