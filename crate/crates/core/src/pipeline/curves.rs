//! Beat-signal spectrum and autocorrelation as plain two-column text.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{acf_from_psd, psd_periodogram, welch_psd, AcfEstimate, SpectrumEstimate};
use crate::error::{Error, Result};

use super::config::RunConfig;
use super::frontend::AnalogFrontEnd;

/// Analog samples simulated for the curves.
pub const CURVE_SAMPLES: usize = 1 << 20;
pub const WELCH_SEGMENT: usize = 1 << 14;
/// Longest lag written to the autocorrelation file.
pub const MAX_ACF_LAG_S: f64 = 100e-9;

pub const PSD_FILE: &str = "psd.txt";
pub const ACF_FILE: &str = "acf.txt";

#[derive(Debug, Clone)]
pub struct Curves {
    /// Welch estimate of the filtered beat signal.
    pub psd: SpectrumEstimate,
    /// Autocorrelation up to [`MAX_ACF_LAG_S`].
    pub acf: AcfEstimate,
}

/// Simulates [`CURVE_SAMPLES`] of the filtered beat signal and estimates its
/// spectrum and autocorrelation.
pub fn compute_curves(cfg: &RunConfig) -> Result<Curves> {
    cfg.validate()?;
    let mut fe = AnalogFrontEnd::new(cfg)?;
    let mut x = vec![0.0; CURVE_SAMPLES];
    fe.fill_analog(&mut x);
    let fs = cfg.sim_rate_hz;
    let psd = welch_psd(&x, fs, WELCH_SEGMENT).map_err(|e| e.in_stage("spectrum"))?;
    let mut acf = acf_from_psd(&psd_periodogram(&x, fs)?).map_err(|e| e.in_stage("autocorrelation"))?;
    let keep = ((MAX_ACF_LAG_S * fs).round() as usize + 1).min(acf.acf.len());
    acf.lags_s.truncate(keep);
    acf.acf.truncate(keep);
    Ok(Curves { psd, acf })
}

fn columns(header: &str, a: &[f64], b: &[f64]) -> String {
    let mut s = format!("# {header}\n");
    for (x, y) in a.iter().zip(b) {
        writeln!(s, "{x:.9e} {y:.9e}").expect("string write");
    }
    s
}

/// Writes [`PSD_FILE`] (`frequency_hz psd`) and [`ACF_FILE`] (`lag_s acf`)
/// into `out_dir`, creating it if needed.
pub fn emit_curves(cfg: &RunConfig, out_dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    let dir = out_dir.as_ref();
    let c = compute_curves(cfg)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let psd_path = dir.join(PSD_FILE);
    let acf_path = dir.join(ACF_FILE);
    fs::write(&psd_path, columns("frequency_hz psd_per_hz", &c.psd.freqs_hz, &c.psd.psd))
        .map_err(|e| Error::io(&psd_path, e))?;
    fs::write(&acf_path, columns("lag_s acf", &c.acf.lags_s, &c.acf.acf))
        .map_err(|e| Error::io(&acf_path, e))?;
    Ok((psd_path, acf_path))
}
