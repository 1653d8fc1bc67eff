//! Randomness metrics for bit sequences and spectral estimates for analog traces.

mod ent;
mod multi_lsb;
mod report;
mod spectrum;
mod stats;
pub mod sts;

pub use ent::{ent_suite, ent_summary, EntSummary, PI_POINT_BITS};
pub use multi_lsb::{multi_lsb_experiment, MultiLsbResult, MIN_CODES as MULTI_LSB_MIN_CODES};
pub use report::{TestEntry, TestReport, Verdict};
pub use spectrum::{acf_direct, acf_from_psd, psd_periodogram, welch_psd, AcfEstimate, SpectrumEstimate};
pub use stats::{bias, serial_correlation, BiasResult, CorrelationResult};
pub use sts::sts_subset;

pub(crate) use stats::serial_correlation_unpacked;
pub(crate) use sts::sts_subset_unpacked;

/// Lags reported by [`battery`].
pub const CORRELATION_LAGS: std::ops::RangeInclusive<usize> = 1..=8;

/// Bias, serial correlation at lags 1 to 8, ENT metrics and the STS subset.
///
/// Steps that cannot run on this input (too short, constant) are recorded as
/// skipped entries instead of errors.
pub fn battery(bits: &crate::extraction::BitSequence, sts_block_len: usize) -> TestReport {
    let mut r = TestReport::new(bits.len());
    match bias(bits) {
        Ok(b) => r.push(b.entry()),
        Err(e) => r.push(TestEntry::skipped("bias", e.to_string())),
    }
    let unpacked = bits.to_bit_vec();
    for lag in CORRELATION_LAGS {
        match serial_correlation_unpacked(&unpacked, lag) {
            Ok(c) => r.push(c.entry()),
            Err(e) => r.push(TestEntry::skipped(format!("serial_correlation_lag{lag}"), e.to_string())),
        }
    }
    match ent_suite(bits, sts::ALPHA) {
        Ok(e) => r.extend(e),
        Err(e) => r.push(TestEntry::skipped("ent", e.to_string())),
    }
    r.extend(sts_subset_unpacked(&unpacked, sts_block_len));
    r
}
