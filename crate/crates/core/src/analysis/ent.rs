//! Bit-level versions of the classic ENT metrics.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{invalid_input, Result};
use crate::extraction::BitSequence;

use super::report::{TestEntry, TestReport};

/// Bits per Monte Carlo point: two 24-bit coordinates.
pub const PI_POINT_BITS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntSummary {
    /// Shannon entropy in bits per bit.
    pub entropy: f64,
    /// χ² of the zero/one counts against equal frequencies.
    pub chi_square: f64,
    /// Probability of exceeding `chi_square` for a truly random sequence.
    pub chi_square_p: f64,
    pub mean: f64,
    pub pi_estimate: f64,
    pub pi_points: usize,
    /// Circular lag-1 correlation; `None` for a constant sequence.
    pub serial_correlation: Option<f64>,
}

impl EntSummary {
    pub fn pi_error(&self) -> f64 {
        (self.pi_estimate - std::f64::consts::PI).abs()
    }
}

fn entropy(p1: f64) -> f64 {
    [p1, 1.0 - p1]
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

fn monte_carlo_pi(bytes: &[u8]) -> (f64, usize) {
    const SCALE: f64 = (1u32 << 24) as f64;
    let coord = |b: &[u8]| ((b[0] as u32) << 16 | (b[1] as u32) << 8 | b[2] as u32) as f64 / SCALE;
    let mut inside = 0usize;
    let mut points = 0usize;
    for p in bytes.chunks_exact(PI_POINT_BITS / 8) {
        let (x, y) = (coord(&p[..3]), coord(&p[3..]));
        inside += (x * x + y * y < 1.0) as usize;
        points += 1;
    }
    (4.0 * inside as f64 / points as f64, points)
}

/// Circular lag-1 correlation over packed bits, counting adjacent `11` pairs.
fn circular_scc(bits: &BitSequence, ones: u64) -> Option<f64> {
    let bytes = bits.as_bytes();
    let n = bits.len();
    let mut both: u64 = 0;
    // Pairs inside each byte, then across byte boundaries.
    for (i, &b) in bytes.iter().enumerate() {
        both += (b & (b << 1)).count_ones() as u64;
        if let Some(&next) = bytes.get(i + 1) {
            both += ((b & 1) & (next >> 7)) as u64;
        }
    }
    // Pad bits are zero, so the only missing pair is the wrap-around one.
    let first = bits.get(0).unwrap_or(false);
    let last = bits.get(n - 1).unwrap_or(false);
    both += (first && last) as u64;
    let (n, s, both) = (n as f64, ones as f64, both as f64);
    let denom = n * s - s * s;
    (denom > 0.0).then(|| (n * both - s * s) / denom)
}

pub fn ent_summary(bits: &BitSequence) -> Result<EntSummary> {
    if bits.len() < PI_POINT_BITS {
        return Err(invalid_input(format!(
            "ENT metrics need at least {PI_POINT_BITS} bits, got {}",
            bits.len()
        )));
    }
    let n = bits.len() as f64;
    let ones = bits.count_ones();
    let mean = ones as f64 / n;
    let expected = n / 2.0;
    let chi_square = ((ones as f64 - expected).powi(2) + (n - ones as f64 - expected).powi(2)) / expected;
    let full_points = bits.len() / PI_POINT_BITS * (PI_POINT_BITS / 8);
    let (pi_estimate, pi_points) = monte_carlo_pi(&bits.as_bytes()[..full_points]);
    Ok(EntSummary {
        entropy: entropy(mean),
        chi_square,
        // One degree of freedom: P(χ² > x) = erfc(√(x/2)).
        chi_square_p: erfc((chi_square / 2.0).sqrt()),
        mean,
        pi_estimate,
        pi_points,
        serial_correlation: circular_scc(bits, ones),
    })
}

/// ENT metrics as report entries. Only the χ² test carries a verdict
/// (at significance `alpha`); the rest are informational.
pub fn ent_suite(bits: &BitSequence, alpha: f64) -> Result<TestReport> {
    let s = ent_summary(bits)?;
    let mut r = TestReport::new(bits.len());
    r.push(TestEntry::info("ent_entropy", Some(s.entropy)));
    r.push(TestEntry::p_test("ent_chi_square", s.chi_square, s.chi_square_p, alpha));
    r.push(TestEntry::info("ent_mean", Some(s.mean)));
    r.push(
        TestEntry::info("ent_monte_carlo_pi", Some(s.pi_estimate))
            .with_note(format!("{} points, error {:.6}", s.pi_points, s.pi_error())),
    );
    r.push(match s.serial_correlation {
        Some(c) => TestEntry::info("ent_serial_correlation", Some(c)),
        None => TestEntry::skipped("ent_serial_correlation", "constant sequence"),
    });
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::pack_bits;

    fn seq(bytes: &[u8]) -> BitSequence {
        BitSequence::from_bytes(bytes.to_vec(), bytes.len() * 8).unwrap()
    }

    #[test]
    fn all_zero_sequence() {
        let s = ent_summary(&seq(&[0; 12])).unwrap();
        assert_eq!((s.entropy, s.mean), (0.0, 0.0));
        assert_eq!(s.serial_correlation, None);
        assert_eq!(s.pi_estimate, 4.0);
        assert_eq!(s.chi_square, 96.0);
    }

    #[test]
    fn balanced_sequence_has_unit_entropy() {
        let s = ent_summary(&seq(&[0x0f; 8])).unwrap();
        assert_eq!(s.entropy, 1.0);
        assert_eq!(s.mean, 0.5);
        assert_eq!(s.chi_square, 0.0);
        assert_eq!(s.chi_square_p, 1.0);
    }

    #[test]
    fn single_point_inside_quarter_circle() {
        let s = ent_summary(&seq(&[0x40, 0, 0, 0x40, 0, 0])).unwrap();
        assert_eq!((s.pi_estimate, s.pi_points), (4.0, 1));
        let s = ent_summary(&seq(&[0xff, 0xff, 0xff, 0xff, 0xff, 0xff])).unwrap();
        assert_eq!(s.pi_estimate, 0.0);
    }

    #[test]
    fn chi_square_tail_probability() {
        // χ² = 0.53 on one degree of freedom; statrs' erfc is good to ~1e-10.
        let p = erfc((0.53f64 / 2.0).sqrt());
        assert!((p - 0.466_606_859_483_617_6).abs() < 1e-9, "{p:e}");
    }

    #[test]
    fn circular_correlation_matches_direct_sum() {
        let bits: Vec<u8> = (0..203u32).map(|i| ((i * 7 + i / 5) % 3 == 0) as u8).collect();
        let packed = pack_bits(&bits);
        let n = bits.len() as f64;
        let s: f64 = bits.iter().map(|&b| b as f64).sum();
        let t: f64 = (0..bits.len())
            .map(|i| (bits[i] & bits[(i + 1) % bits.len()]) as f64)
            .sum();
        let want = (n * t - s * s) / (n * s - s * s);
        let got = ent_summary(&packed).unwrap().serial_correlation.unwrap();
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn short_input_rejected() {
        assert!(ent_summary(&pack_bits(&[1; 47])).is_err());
    }
}
