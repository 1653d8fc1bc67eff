//! Correlation among several low-order bits taken from the same code,
//! compared with the lag-1 correlation of the pairwise-subtraction bits.

use serde::{Deserialize, Serialize};

use crate::acquisition::SampleBlock;
use crate::error::{invalid_input, invalid_param, Result};
use crate::extraction::{final_bits, k_lsb_extract};

use super::stats::{bit_pearson, serial_correlation};
use super::sts::frequency;

pub const MIN_CODES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiLsbResult {
    pub k: u32,
    pub n_codes: usize,
    /// `(i, j, r_ij)` for bit positions `i < j < k`, position 0 being the LSB.
    pub pair_correlations: Vec<(u32, u32, f64)>,
    /// Mean of `|r_ij|` over all pairs.
    pub within_group_corr: f64,
    /// `3/√n_codes`.
    pub within_group_threshold: f64,
    /// `|a_1|` of the final bits of the same block.
    pub baseline_corr: f64,
    /// `3/√(n_codes/2)`.
    pub baseline_threshold: f64,
    /// Frequency-test p-value of the k-LSB stream.
    pub k_lsb_frequency_p: f64,
    /// Frequency-test p-value of the final bits.
    pub final_frequency_p: f64,
}

impl MultiLsbResult {
    /// `within_group_corr / baseline_corr`.
    pub fn ratio(&self) -> f64 {
        self.within_group_corr / self.baseline_corr
    }
}

pub fn multi_lsb_experiment(block: &SampleBlock, k: u32) -> Result<MultiLsbResult> {
    if !(2..=8).contains(&k) {
        return Err(invalid_param(format!("k must be in 2..=8 to form bit pairs, got {k}")));
    }
    let n = block.len();
    if n < MIN_CODES {
        return Err(invalid_input(format!("need at least {MIN_CODES} codes, got {n}")));
    }
    let columns: Vec<Vec<u8>> = (0..k)
        .map(|i| block.codes.iter().map(|&c| (c >> i) & 1).collect())
        .collect();
    let mut pair_correlations = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let r = bit_pearson(&columns[i as usize], &columns[j as usize])?;
            pair_correlations.push((i, j, r));
        }
    }
    let within_group_corr =
        pair_correlations.iter().map(|p| p.2.abs()).sum::<f64>() / pair_correlations.len() as f64;

    let fin = final_bits(block);
    let baseline = serial_correlation(&fin, 1)?;
    let k_stream = k_lsb_extract(block, k)?.to_bit_vec();

    Ok(MultiLsbResult {
        k,
        n_codes: n,
        pair_correlations,
        within_group_corr,
        within_group_threshold: 3.0 / (n as f64).sqrt(),
        baseline_corr: baseline.coefficient.abs(),
        baseline_threshold: baseline.threshold,
        k_lsb_frequency_p: frequency(&k_stream)?.p_value,
        final_frequency_p: frequency(&fin.to_bit_vec())?.p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn two_bit_toy_distribution() {
        // p(00) = p(11) = 0.4, p(01) = p(10) = 0.1: cov 0.15 over variances 0.25.
        let mut codes: Vec<u8> = [(0u8, 4000), (1, 1000), (2, 1000), (3, 4000)]
            .iter()
            .flat_map(|&(c, n)| std::iter::repeat(c).take(n))
            .collect();
        codes.shuffle(&mut Xoshiro256PlusPlus::seed_from_u64(5));
        let r = multi_lsb_experiment(&SampleBlock::new(codes, 40e6), 2).unwrap();
        assert_eq!(r.pair_correlations.len(), 1);
        assert!((r.within_group_corr - 0.6).abs() < 1e-12);
    }

    #[test]
    fn uniform_codes_are_uncorrelated() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        let codes: Vec<u8> = (0..200_000).map(|_| rng.gen()).collect();
        let r = multi_lsb_experiment(&SampleBlock::new(codes, 40e6), 5).unwrap();
        assert_eq!(r.pair_correlations.len(), 10);
        assert!(r.within_group_corr < r.within_group_threshold);
        assert!(r.baseline_corr < r.baseline_threshold);
    }

    #[test]
    fn parameter_checks() {
        let b = SampleBlock::new(vec![0, 1].repeat(5000), 40e6);
        assert!(multi_lsb_experiment(&b, 1).is_err());
        assert!(multi_lsb_experiment(&b, 9).is_err());
        let short = SampleBlock::new(vec![0; 100], 40e6);
        assert!(multi_lsb_experiment(&short, 5).is_err());
    }
}
