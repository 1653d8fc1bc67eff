use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, Error, Result};
use crate::extraction::BitSequence;

use super::report::TestEntry;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasResult {
    /// Fraction of ones.
    pub p1: f64,
    /// `|p1 − 0.5|`.
    pub bias: f64,
    /// `1.5/√N`.
    pub threshold: f64,
}

impl BiasResult {
    pub fn passed(&self) -> bool {
        self.bias < self.threshold
    }

    pub fn entry(&self) -> TestEntry {
        TestEntry::bound("bias", self.bias, self.threshold)
            .with_note(format!("p1 = {:.7}", self.p1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub lag: usize,
    pub coefficient: f64,
    /// `3/√N`.
    pub threshold: f64,
}

impl CorrelationResult {
    pub fn passed(&self) -> bool {
        self.coefficient.abs() < self.threshold
    }

    pub fn entry(&self) -> TestEntry {
        TestEntry::bound(format!("serial_correlation_lag{}", self.lag), self.coefficient, self.threshold)
    }
}

pub fn bias(bits: &BitSequence) -> Result<BiasResult> {
    if bits.is_empty() {
        return Err(invalid_input("bias of an empty sequence"));
    }
    let n = bits.len() as f64;
    let p1 = bits.count_ones() as f64 / n;
    Ok(BiasResult {
        p1,
        bias: (p1 - 0.5).abs(),
        threshold: 1.5 / n.sqrt(),
    })
}

/// Sample Pearson correlation between `b[i]` and `b[i + lag]`.
pub fn serial_correlation(bits: &BitSequence, lag: usize) -> Result<CorrelationResult> {
    let unpacked = bits.to_bit_vec();
    serial_correlation_unpacked(&unpacked, lag)
}

/// As [`serial_correlation`] on pre-unpacked 0/1 values.
pub(crate) fn serial_correlation_unpacked(bits: &[u8], lag: usize) -> Result<CorrelationResult> {
    if lag == 0 {
        return Err(invalid_input("lag must be positive"));
    }
    if bits.len() <= lag + 1 {
        return Err(invalid_input(format!(
            "lag {lag} needs more than {} bits, got {}",
            lag + 1,
            bits.len()
        )));
    }
    let m = bits.len() - lag;
    let (x, y) = (&bits[..m], &bits[lag..]);
    let sx: u64 = x.iter().map(|&b| b as u64).sum();
    let sy = sx - bits[..lag].iter().map(|&b| b as u64).sum::<u64>()
        + bits[m..].iter().map(|&b| b as u64).sum::<u64>();
    let sxy: u64 = x.iter().zip(y).map(|(&a, &b)| (a & b) as u64).sum();
    let (m, sx, sy, sxy) = (m as f64, sx as f64, sy as f64, sxy as f64);
    let vx = m * sx - sx * sx;
    let vy = m * sy - sy * sy;
    if vx <= 0.0 || vy <= 0.0 {
        return Err(Error::DegenerateVariance(format!(
            "constant sequence, correlation at lag {lag} undefined"
        )));
    }
    Ok(CorrelationResult {
        lag,
        coefficient: (m * sxy - sx * sy) / (vx * vy).sqrt(),
        threshold: 3.0 / (bits.len() as f64).sqrt(),
    })
}

/// Pearson correlation of two equal-length 0/1 vectors.
pub(crate) fn bit_pearson(x: &[u8], y: &[u8]) -> Result<f64> {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let sx = x.iter().map(|&b| b as u64).sum::<u64>() as f64;
    let sy = y.iter().map(|&b| b as u64).sum::<u64>() as f64;
    let sxy = x.iter().zip(y).map(|(&a, &b)| (a & b) as u64).sum::<u64>() as f64;
    let vx = n * sx - sx * sx;
    let vy = n * sy - sy * sy;
    if vx <= 0.0 || vy <= 0.0 {
        return Err(Error::DegenerateVariance("constant bit column".into()));
    }
    Ok((n * sxy - sx * sy) / (vx * vy).sqrt())
}
