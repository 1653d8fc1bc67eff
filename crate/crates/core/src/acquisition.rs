//! Point sampling and 8-bit quantization of the detector voltage, plus the
//! raw code file format.
//!
//! # Code files
//!
//! A code file is a headerless byte stream, one ADC code per byte, in
//! acquisition order. The sample rate travels in a sidecar `<path>.meta`
//! holding a single `sample_rate_hz = <value>` line. Three codes
//! `[0, 255, 128]` produce the 3-byte file
//!
//! ```text
//! 00000000  00 ff 80                                          |...|
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, invalid_param, Error, Result};

pub const ADC_BITS: u32 = 8;
pub const ADC_LEVELS: usize = 1 << ADC_BITS;

/// Sample rate assumed for code files without a sidecar.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 40e6;

/// Full scale is this many standard deviations of the calibration block.
pub const FULL_SCALE_SIGMAS: f64 = 3.0;

/// Decimated samples used to calibrate the full scale.
pub const CALIBRATION_SAMPLES: usize = 100_000;

const RATIO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionParams {
    pub sample_rate_hz: f64,
    pub adc_bits: u32,
    /// Half-range of the converter: inputs span `[−full_scale_v, +full_scale_v)`.
    pub full_scale_v: f64,
}

impl AcquisitionParams {
    pub fn new(sample_rate_hz: f64, full_scale_v: f64) -> Result<Self> {
        let p = Self {
            sample_rate_hz,
            adc_bits: ADC_BITS,
            full_scale_v,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.adc_bits != ADC_BITS {
            return Err(invalid_param(format!(
                "adc_bits must be {ADC_BITS}, got {}",
                self.adc_bits
            )));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(invalid_param(format!(
                "sample_rate_hz must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        if !(self.full_scale_v.is_finite() && self.full_scale_v > 0.0) {
            return Err(invalid_param(format!(
                "full_scale_v must be positive, got {}",
                self.full_scale_v
            )));
        }
        Ok(())
    }

    /// Width of one quantization bin, `2·FS/256`.
    pub fn lsb_v(&self) -> f64 {
        2.0 * self.full_scale_v / ADC_LEVELS as f64
    }

    /// Sampling interval `Δt = 1/sample_rate`.
    pub fn sample_interval_s(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }
}

/// Block of 8-bit ADC codes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBlock {
    pub codes: Vec<u8>,
    pub sample_rate_hz: f64,
}

impl SampleBlock {
    pub fn new(codes: Vec<u8>, sample_rate_hz: f64) -> Self {
        Self {
            codes,
            sample_rate_hz,
        }
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Occupancy of each of the 256 bins.
    pub fn histogram(&self) -> [u64; ADC_LEVELS] {
        let mut h = [0u64; ADC_LEVELS];
        for &c in &self.codes {
            h[c as usize] += 1;
        }
        h
    }
}

/// Integer decimation factor `M = fs_in / fs_out`.
pub fn decimation_factor(fs_in_hz: f64, fs_out_hz: f64) -> Result<usize> {
    if !(fs_in_hz > 0.0 && fs_out_hz > 0.0 && fs_in_hz.is_finite() && fs_out_hz.is_finite()) {
        return Err(invalid_param(format!(
            "sample rates must be positive, got {fs_in_hz} and {fs_out_hz}"
        )));
    }
    if fs_in_hz < fs_out_hz {
        return Err(invalid_param(format!(
            "cannot decimate {fs_in_hz} Hz up to {fs_out_hz} Hz"
        )));
    }
    let ratio = fs_in_hz / fs_out_hz;
    let m = ratio.round();
    if (ratio - m).abs() >= RATIO_TOLERANCE {
        return Err(invalid_param(format!(
            "rate ratio {fs_in_hz}/{fs_out_hz} = {ratio} is not an integer"
        )));
    }
    Ok(m as usize)
}

/// Point sampling: `out[i] = signal[i·M]`, no anti-alias filter.
pub fn decimate(signal: &[f64], fs_in_hz: f64, fs_out_hz: f64) -> Result<Vec<f64>> {
    let m = decimation_factor(fs_in_hz, fs_out_hz)?;
    Ok(signal.iter().step_by(m).take(signal.len() / m).copied().collect())
}

#[inline]
fn code_of(v: f64, full_scale: f64) -> u8 {
    let x = ((v + full_scale) / (2.0 * full_scale) * ADC_LEVELS as f64).floor();
    x.clamp(0.0, (ADC_LEVELS - 1) as f64) as u8
}

/// Mid-rise 8-bit quantizer: `code = clamp(⌊(v + FS)/(2FS)·256⌋, 0, 255)`.
pub fn quantize(signal: &[f64], params: &AcquisitionParams) -> Result<SampleBlock> {
    params.validate()?;
    let mut codes = Vec::with_capacity(signal.len());
    quantize_into(signal, params.full_scale_v, &mut codes)?;
    Ok(SampleBlock::new(codes, params.sample_rate_hz))
}

/// Appends the codes of `signal` to `out`.
pub(crate) fn quantize_into(signal: &[f64], full_scale_v: f64, out: &mut Vec<u8>) -> Result<()> {
    for (i, &v) in signal.iter().enumerate() {
        if v.is_nan() {
            return Err(Error::Data {
                index: i,
                reason: "NaN voltage".into(),
            });
        }
        out.push(code_of(v, full_scale_v));
    }
    Ok(())
}

/// Centre voltage of bin `code`.
pub fn dequantize_midpoint(code: u8, full_scale_v: f64) -> f64 {
    (code as f64 + 0.5) * (2.0 * full_scale_v / ADC_LEVELS as f64) - full_scale_v
}

/// `FS = 3·σ̂` of a calibration block (sample standard deviation).
pub fn calibrate_full_scale(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(invalid_input(format!(
            "full-scale calibration needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let fs = FULL_SCALE_SIGMAS * var.sqrt();
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(Error::DegenerateVariance(
            "calibration block has zero variance".into(),
        ));
    }
    Ok(fs)
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Writes the raw code file and its sample-rate sidecar.
pub fn write_codes(block: &SampleBlock, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, &block.codes).map_err(|e| Error::io(path, e))?;
    let meta = sidecar_path(path);
    fs::write(&meta, format!("sample_rate_hz = {:e}\n", block.sample_rate_hz))
        .map_err(|e| Error::io(&meta, e))
}

/// Reads a raw code file; the sample rate comes from the sidecar when present,
/// otherwise [`DEFAULT_SAMPLE_RATE_HZ`].
pub fn read_codes(path: impl AsRef<Path>) -> Result<SampleBlock> {
    let path = path.as_ref();
    let codes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let meta = sidecar_path(path);
    let sample_rate_hz = match fs::read_to_string(&meta) {
        Ok(text) => parse_sidecar(&text)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            log::warn!(
                "no sidecar for {}; assuming {DEFAULT_SAMPLE_RATE_HZ} Hz",
                path.display()
            );
            DEFAULT_SAMPLE_RATE_HZ
        }
        Err(e) => return Err(Error::io(&meta, e)),
    };
    Ok(SampleBlock::new(codes, sample_rate_hz))
}

fn parse_sidecar(text: &str) -> Result<f64> {
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some((k, v)) = line.split_once('=') {
            if k.trim() == "sample_rate_hz" {
                return v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad sample_rate_hz `{}`", v.trim())));
            }
        }
    }
    Err(Error::Config("sidecar lacks sample_rate_hz".into()))
}
