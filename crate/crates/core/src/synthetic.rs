//! Synthetic code sources with known statistics, used to exercise the
//! extraction and analysis stages independently of the laser simulation.

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::acquisition::{quantize, AcquisitionParams, SampleBlock, ADC_LEVELS};
use crate::error::{invalid_param, Result};

fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// I.i.d. codes with `P(code odd) = 0.5 + epsilon`, uniform within each parity class.
pub fn parity_biased_codes(n: usize, epsilon: f64, seed: u64) -> Result<SampleBlock> {
    if !(epsilon.abs() <= 0.5) {
        return Err(invalid_param(format!("parity bias must lie in [-0.5, 0.5], got {epsilon}")));
    }
    let mut r = rng(seed);
    let p_odd = 0.5 + epsilon;
    let codes = (0..n)
        .map(|_| {
            let pair: u8 = r.gen();
            let odd = r.gen::<f64>() < p_odd;
            (pair & 0xfe) | odd as u8
        })
        .collect();
    Ok(SampleBlock::new(codes, 40e6))
}

/// Uniform voltages over `[−full_scale, +full_scale)`.
pub fn uniform_voltages(n: usize, full_scale_v: f64, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| r.gen_range(-full_scale_v..full_scale_v))
        .collect()
}

/// Converter with differential nonlinearity: within each even/odd bin pair the
/// odd bin is wider by `skew`, even narrower, so a uniform input lands on odd
/// codes with probability `(1 + skew)/2`.
#[derive(Debug, Clone, Copy)]
pub struct SkewedQuantizer {
    full_scale_v: f64,
    skew: f64,
}

impl SkewedQuantizer {
    /// Quantizer whose uniform-input parity bias is `epsilon` (`skew = 2ε`).
    pub fn with_parity_bias(full_scale_v: f64, epsilon: f64) -> Result<Self> {
        if !(full_scale_v > 0.0) || !(epsilon.abs() < 0.5) {
            return Err(invalid_param(format!(
                "need full_scale_v > 0 and |epsilon| < 0.5, got {full_scale_v}, {epsilon}"
            )));
        }
        Ok(Self {
            full_scale_v,
            skew: 2.0 * epsilon,
        })
    }

    pub fn quantize(&self, signal: &[f64], sample_rate_hz: f64) -> SampleBlock {
        let pair_width = 4.0 * self.full_scale_v / ADC_LEVELS as f64;
        let even_width = 0.5 * pair_width * (1.0 - self.skew);
        let codes = signal
            .iter()
            .map(|&v| {
                let x = (v + self.full_scale_v).clamp(0.0, 2.0 * self.full_scale_v);
                let pair = ((x / pair_width).floor() as usize).min(ADC_LEVELS / 2 - 1);
                let within = x - pair as f64 * pair_width;
                (2 * pair + (within >= even_width) as usize) as u8
            })
            .collect();
        SampleBlock::new(codes, sample_rate_hz)
    }
}

/// Zero-mean Gaussian voltages with standard deviation `sigma_lsb` bins, passed
/// through the standard mid-rise quantizer. With a small `sigma_lsb` the code
/// distribution is strongly non-uniform, yet symmetric about the 127/128 bin
/// edge, so each individual bit stays unbiased while low-order bits of the
/// same code are correlated.
pub fn narrow_gaussian_codes(n: usize, sigma_lsb: f64, seed: u64) -> Result<SampleBlock> {
    let params = AcquisitionParams::new(40e6, 1.0)?;
    let normal = Normal::new(0.0, sigma_lsb * params.lsb_v())
        .map_err(|e| invalid_param(format!("bad sigma {sigma_lsb}: {e}")))?;
    let mut r = rng(seed);
    let v: Vec<f64> = (0..n).map(|_| normal.sample(&mut r)).collect();
    quantize(&v, &params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skewed_quantizer_bin_edges() {
        let q = SkewedQuantizer::with_parity_bias(128.0, 0.25).unwrap();
        // Pair width 2 V; even bin covers 0.5 V of it, odd bin 1.5 V.
        let b = q.quantize(&[-128.0, -127.6, -127.4, -126.1, 127.99, 500.0, -500.0], 40e6);
        assert_eq!(b.codes, vec![0, 0, 1, 1, 255, 255, 0]);
    }

    #[test]
    fn skewed_quantizer_parity_probability() {
        let q = SkewedQuantizer::with_parity_bias(1.0, 0.05).unwrap();
        let v = uniform_voltages(400_000, 1.0, 3);
        let b = q.quantize(&v, 40e6);
        let odd = b.codes.iter().filter(|&&c| c & 1 == 1).count() as f64 / v.len() as f64;
        assert!((odd - 0.55).abs() < 3.0 * (0.25f64 / 400_000.0).sqrt(), "{odd}");
    }

    #[test]
    fn parity_biased_source() {
        let b = parity_biased_codes(200_000, -0.1, 1).unwrap();
        let odd = b.codes.iter().filter(|&&c| c & 1 == 1).count() as f64 / 200_000.0;
        assert!((odd - 0.4).abs() < 0.004);
        assert!(parity_biased_codes(10, 0.7, 1).is_err());
    }

    #[test]
    fn narrow_gaussian_is_centred_on_mid_scale() {
        let b = narrow_gaussian_codes(100_000, 4.0, 9).unwrap();
        let h = b.histogram();
        assert!(h[127] > 0 && h[128] > 0);
        let lo: u64 = h[..128].iter().sum();
        assert!((lo as f64 / 100_000.0 - 0.5).abs() < 0.01);
        assert_eq!(h[100], 0);
    }
}
