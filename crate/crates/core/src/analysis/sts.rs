//! A subset of the NIST SP 800-22 battery.
//!
//! | test            | parameter                     | minimum length |
//! |-----------------|-------------------------------|----------------|
//! | frequency       | none                          | 100            |
//! | block frequency | block length `M` (default 128)| `128·M`        |
//! | cumulative sums | both directions, worst kept   | 100            |
//! | runs            | frequency pre-test `2/√n`     | 100            |
//! | longest run     | `M` = 8 / 128 / 10⁴ by length | 128            |
//!
//! Longest-run tiers follow the standard suite: `n < 6272` uses `M = 8`,
//! `n < 750000` uses `M = 128`, otherwise `M = 10000`.
//!
//! The test functions take one byte (0 or 1) per bit and do not apply the
//! minimum lengths; [`sts_subset`] does.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

use crate::error::{invalid_input, Result};
use crate::extraction::BitSequence;

use super::report::{TestEntry, TestReport};

pub const ALPHA: f64 = 0.01;
pub const DEFAULT_BLOCK_LEN: usize = 128;
pub const MIN_BITS: usize = 100;
pub const MIN_BLOCKS: usize = 128;
pub const LONGEST_RUN_MIN_BITS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StsResult {
    pub statistic: f64,
    pub p_value: f64,
}

struct LongestRunTier {
    block: usize,
    /// Longest runs at or below this fall into category 0.
    lowest: usize,
    probabilities: &'static [f64],
}

const LONGEST_RUN_TIERS: [(usize, LongestRunTier); 3] = [
    (
        0,
        LongestRunTier {
            block: 8,
            lowest: 1,
            probabilities: &[0.21484375, 0.3671875, 0.23046875, 0.1875],
        },
    ),
    (
        6272,
        LongestRunTier {
            block: 128,
            lowest: 4,
            probabilities: &[0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847],
        },
    ),
    (
        750_000,
        LongestRunTier {
            block: 10_000,
            lowest: 10,
            probabilities: &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
        },
    ),
];

fn nonempty(bits: &[u8]) -> Result<()> {
    if bits.is_empty() {
        Err(invalid_input("empty bit sequence"))
    } else {
        Ok(())
    }
}

fn ones(bits: &[u8]) -> usize {
    bits.iter().map(|&b| b as usize).sum()
}

fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Statistic is `|S_n|/√n`.
pub fn frequency(bits: &[u8]) -> Result<StsResult> {
    nonempty(bits)?;
    let n = bits.len() as f64;
    let s = 2.0 * ones(bits) as f64 - n;
    let s_obs = s.abs() / n.sqrt();
    Ok(StsResult {
        statistic: s_obs,
        p_value: erfc(s_obs / std::f64::consts::SQRT_2),
    })
}

/// Statistic is the χ² over `⌊n/M⌋` blocks of `M` bits; the tail is discarded.
pub fn block_frequency(bits: &[u8], block_len: usize) -> Result<StsResult> {
    if block_len == 0 || bits.len() < block_len {
        return Err(invalid_input(format!(
            "block length {block_len} needs at least one full block, got {} bits",
            bits.len()
        )));
    }
    let m = block_len as f64;
    let blocks = bits.chunks_exact(block_len);
    let count = blocks.len() as f64;
    let chi: f64 = 4.0
        * m
        * blocks
            .map(|b| (ones(b) as f64 / m - 0.5).powi(2))
            .sum::<f64>();
    Ok(StsResult {
        statistic: chi,
        p_value: gamma_ur(count / 2.0, chi / 2.0),
    })
}

/// Statistic is the maximal excursion `z` of the ±1 random walk.
pub fn cumulative_sums(bits: &[u8], forward: bool) -> Result<StsResult> {
    nonempty(bits)?;
    let step = |&b: &u8| if b == 1 { 1i64 } else { -1 };
    let mut s = 0i64;
    let mut z = 0i64;
    let mut walk = |b: &u8| {
        s += step(b);
        z = z.max(s.abs());
    };
    if forward {
        bits.iter().for_each(&mut walk);
    } else {
        bits.iter().rev().for_each(&mut walk);
    }
    let n = bits.len() as f64;
    let zf = z as f64;
    let sq = n.sqrt();
    let nz = n / zf;
    let range = |lo: f64, hi: f64| (lo.trunc() as i64)..=(hi.trunc() as i64);
    let s1: f64 = range((-nz + 1.0) / 4.0, (nz - 1.0) / 4.0)
        .map(|k| phi((4 * k + 1) as f64 * zf / sq) - phi((4 * k - 1) as f64 * zf / sq))
        .sum();
    let s2: f64 = range((-nz - 3.0) / 4.0, (nz - 1.0) / 4.0)
        .map(|k| phi((4 * k + 3) as f64 * zf / sq) - phi((4 * k + 1) as f64 * zf / sq))
        .sum();
    Ok(StsResult {
        statistic: zf,
        p_value: (1.0 - s1 + s2).clamp(0.0, 1.0),
    })
}

/// Statistic is the total number of runs `V_n`. A sequence failing the
/// frequency pre-test gets `p = 0`.
pub fn runs(bits: &[u8]) -> Result<StsResult> {
    nonempty(bits)?;
    let n = bits.len() as f64;
    let pi = ones(bits) as f64 / n;
    let v = 1 + bits.windows(2).filter(|w| w[0] != w[1]).count();
    let v = v as f64;
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return Ok(StsResult {
            statistic: v,
            p_value: 0.0,
        });
    }
    let q = pi * (1.0 - pi);
    Ok(StsResult {
        statistic: v,
        p_value: erfc((v - 2.0 * n * q).abs() / (2.0 * (2.0 * n).sqrt() * q)),
    })
}

/// Statistic is the χ² over longest-run categories.
pub fn longest_run(bits: &[u8]) -> Result<StsResult> {
    if bits.len() < LONGEST_RUN_MIN_BITS {
        return Err(invalid_input(format!(
            "longest-run test needs {LONGEST_RUN_MIN_BITS} bits, got {}",
            bits.len()
        )));
    }
    let tier = &LONGEST_RUN_TIERS
        .iter()
        .rev()
        .find(|(min, _)| bits.len() >= *min)
        .expect("first tier starts at 0")
        .1;
    let k = tier.probabilities.len() - 1;
    let mut nu = vec![0usize; k + 1];
    let blocks = bits.chunks_exact(tier.block);
    let count = blocks.len() as f64;
    for b in blocks {
        let mut run = 0usize;
        let mut best = 0usize;
        for &bit in b {
            run = if bit == 1 { run + 1 } else { 0 };
            best = best.max(run);
        }
        nu[best.saturating_sub(tier.lowest).min(k)] += 1;
    }
    let chi: f64 = nu
        .iter()
        .zip(tier.probabilities)
        .map(|(&o, &p)| (o as f64 - count * p).powi(2) / (count * p))
        .sum();
    Ok(StsResult {
        statistic: chi,
        p_value: gamma_ur(k as f64 / 2.0, chi / 2.0),
    })
}

fn entry(name: &str, r: Result<StsResult>) -> TestEntry {
    match r {
        Ok(r) => TestEntry::p_test(name, r.statistic, r.p_value, ALPHA),
        Err(e) => TestEntry::skipped(name, e.to_string()),
    }
}

/// Runs the five tests at `α = 0.01`; tests whose minimum length is not met
/// are reported as skipped.
pub fn sts_subset(bits: &BitSequence, block_len: usize) -> TestReport {
    sts_subset_unpacked(&bits.to_bit_vec(), block_len)
}

pub(crate) fn sts_subset_unpacked(bits: &[u8], block_len: usize) -> TestReport {
    let n = bits.len();
    let mut r = TestReport::new(n);
    let short = |need: usize| format!("needs {need} bits, got {n}");
    if n >= MIN_BITS {
        r.push(entry("frequency", frequency(bits)));
    } else {
        r.push(TestEntry::skipped("frequency", short(MIN_BITS)));
    }
    let bf_need = MIN_BLOCKS.saturating_mul(block_len);
    if block_len > 0 && n >= bf_need {
        r.push(entry("block_frequency", block_frequency(bits, block_len)));
    } else {
        r.push(TestEntry::skipped("block_frequency", short(bf_need.max(MIN_BLOCKS))));
    }
    if n >= MIN_BITS {
        let fwd = cumulative_sums(bits, true);
        let rev = cumulative_sums(bits, false);
        let worst = match (fwd, rev) {
            (Ok(f), Ok(b)) => Ok(if b.p_value < f.p_value { b } else { f }),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
        r.push(entry("cumulative_sums", worst).with_note("worst of forward and reverse"));
        r.push(entry("runs", runs(bits)));
    } else {
        r.push(TestEntry::skipped("cumulative_sums", short(MIN_BITS)));
        r.push(TestEntry::skipped("runs", short(MIN_BITS)));
    }
    r.push(entry("longest_run", longest_run(bits)));
    r
}
