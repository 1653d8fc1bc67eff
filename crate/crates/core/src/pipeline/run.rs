use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::acquisition::{calibrate_full_scale, quantize_into, SampleBlock, CALIBRATION_SAMPLES};
use crate::analysis::{battery, TestReport};
use crate::error::Result;
use crate::extraction::{append_final_bits, read_bits, BitSequence};

use super::config::{FullScale, RunConfig};
use super::frontend::AnalogFrontEnd;

/// Codes per processing chunk; even, so code pairs never straddle chunks.
pub const CHUNK_CODES: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Wall time of simulation through extraction; analysis excluded.
    pub seconds: f64,
    pub codes_per_s: f64,
    pub bits_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// `None` for reports on existing bit files.
    pub config: Option<RunConfig>,
    pub full_scale_v: Option<f64>,
    pub n_codes: Option<usize>,
    pub bit_len: usize,
    pub tests: TestReport,
    pub timing: Option<Timing>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.tests.all_passed()
    }

    /// Line-oriented report: `#` header lines, then one test per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(c) = &self.config {
            for line in c.to_text().lines() {
                s.push_str(&format!("# config {line}\n"));
            }
        }
        if let Some(fs) = self.full_scale_v {
            s.push_str(&format!("# full_scale_v = {fs:e}\n"));
        }
        if let Some(n) = self.n_codes {
            s.push_str(&format!("# n_codes = {n}\n"));
        }
        if let Some(t) = &self.timing {
            s.push_str(&format!(
                "# timing seconds = {:.3} codes_per_s = {:.4e} bits_per_s = {:.4e}\n",
                t.seconds, t.codes_per_s, t.bits_per_s
            ));
        }
        for w in &self.warnings {
            s.push_str(&format!("# warning: {w}\n"));
        }
        s.push_str(&self.tests.to_text());
        s.push_str(&format!(
            "# overall {}\n",
            if self.all_passed() { "PASS" } else { "FAIL" }
        ));
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }
}

/// Streams `cfg.n_codes` codes to `sink` in chunks of [`CHUNK_CODES`]; returns
/// the full scale used.
///
/// With automatic full scale the first [`CALIBRATION_SAMPLES`] sampled
/// voltages set the range and are then quantized as the leading codes.
pub fn acquire_with(cfg: &RunConfig, mut sink: impl FnMut(&[u8]) -> Result<()>) -> Result<f64> {
    cfg.validate()?;
    let n = cfg.n_codes;
    let mut fe = AnalogFrontEnd::new(cfg)?;
    let (full_scale, pending) = match cfg.full_scale {
        FullScale::Auto => {
            let cal = fe.sampled(CALIBRATION_SAMPLES);
            let fs = calibrate_full_scale(&cal).map_err(|e| e.in_stage("calibrate"))?;
            (fs, cal)
        }
        FullScale::Fixed(v) => (v, Vec::new()),
    };
    log::info!("full scale {full_scale:.4e} V, decimation {}", fe.decimation());
    let mut pending = &pending[..];
    let mut volts = vec![0.0; CHUNK_CODES.min(n)];
    let mut codes = Vec::with_capacity(volts.len());
    let mut done = 0;
    while done < n {
        let len = CHUNK_CODES.min(n - done);
        let buf = &mut volts[..len];
        let reuse = pending.len().min(len);
        buf[..reuse].copy_from_slice(&pending[..reuse]);
        pending = &pending[reuse..];
        fe.fill_sampled(&mut buf[reuse..]);
        codes.clear();
        quantize_into(buf, full_scale, &mut codes).map_err(|e| e.in_stage("quantize"))?;
        sink(&codes)?;
        done += len;
        log::debug!("{done}/{n} codes");
    }
    Ok(full_scale)
}

/// All codes of a run in memory.
pub fn acquire_codes(cfg: &RunConfig) -> Result<SampleBlock> {
    let mut codes = Vec::with_capacity(cfg.n_codes);
    acquire_with(cfg, |c| {
        codes.extend_from_slice(c);
        Ok(())
    })?;
    Ok(SampleBlock::new(codes, cfg.sample_rate_hz))
}

/// Final bits of a run, without analysis.
pub fn generate_bits(cfg: &RunConfig) -> Result<(BitSequence, f64)> {
    let mut bits = BitSequence::with_capacity(cfg.n_codes / 2);
    let fs = acquire_with(cfg, |c| {
        append_final_bits(c, &mut bits);
        Ok(())
    })?;
    Ok((bits, fs))
}

/// Simulate, acquire, extract and analyze.
pub fn run_pipeline(cfg: &RunConfig) -> Result<(BitSequence, RunReport)> {
    let start = Instant::now();
    let (bits, full_scale) = generate_bits(cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    let codes_per_s = cfg.n_codes as f64 / seconds;
    let tests = battery(&bits, cfg.sts_block_len);
    let report = RunReport {
        config: Some(cfg.clone()),
        full_scale_v: Some(full_scale),
        n_codes: Some(cfg.n_codes),
        bit_len: bits.len(),
        tests,
        timing: Some(Timing {
            seconds,
            codes_per_s,
            bits_per_s: codes_per_s / 2.0,
        }),
        warnings: cfg.warnings(),
    };
    Ok((bits, report))
}

/// The analysis battery of [`run_pipeline`] on an existing sequence.
pub fn analyze_bits(bits: &BitSequence, sts_block_len: usize) -> RunReport {
    RunReport {
        config: None,
        full_scale_v: None,
        n_codes: None,
        bit_len: bits.len(),
        tests: battery(bits, sts_block_len),
        timing: None,
        warnings: Vec::new(),
    }
}

pub fn analyze_file(bits_path: impl AsRef<Path>, bit_len: usize, sts_block_len: usize) -> Result<RunReport> {
    let bits = read_bits(bits_path, bit_len).map_err(|e| e.in_stage("read bits"))?;
    Ok(analyze_bits(&bits, sts_block_len))
}
