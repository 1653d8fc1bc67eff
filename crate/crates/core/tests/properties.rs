use phase_trng::acquisition::{decimate, quantize, AcquisitionParams};
use phase_trng::analysis::{
    acf_from_psd, bias, ent_summary, psd_periodogram, serial_correlation, sts, sts_subset, Verdict,
};
use phase_trng::extraction::{final_bits, lsb_extract, pack_bits, BitSequence};
use phase_trng::acquisition::SampleBlock;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

fn bits_strategy(min: usize, max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=1, min..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn p_values_lie_in_unit_interval(bits in bits_strategy(100, 3000)) {
        let r = sts_subset(&pack_bits(&bits), 16);
        for e in &r.entries {
            if let Some(p) = e.p_value {
                prop_assert!((0.0..=1.0).contains(&p), "{} p = {}", e.name, p);
                let expect = if p >= sts::ALPHA { Verdict::Pass } else { Verdict::Fail };
                prop_assert_eq!(e.verdict, expect);
            }
        }
    }

    #[test]
    fn balanced_sequences_give_unit_frequency_p(seed in any::<u64>(), half in 50usize..2000) {
        let mut bits = vec![1u8; half];
        bits.extend(vec![0u8; half]);
        let mut r = Xoshiro256PlusPlus::seed_from_u64(seed);
        for i in (1..bits.len()).rev() {
            bits.swap(i, r.gen_range(0..=i));
        }
        prop_assert_eq!(sts::frequency(&bits).unwrap().p_value, 1.0);
    }

    #[test]
    fn entropy_depends_only_on_counts(bits in bits_strategy(48, 2000), seed in any::<u64>()) {
        let mut shuffled = bits.clone();
        let mut r = Xoshiro256PlusPlus::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, r.gen_range(0..=i));
        }
        let a = ent_summary(&pack_bits(&bits)).unwrap();
        let b = ent_summary(&pack_bits(&shuffled)).unwrap();
        prop_assert_eq!(a.entropy, b.entropy);
        prop_assert_eq!(a.mean, b.mean);
        prop_assert_eq!(a.chi_square, b.chi_square);
    }

    #[test]
    fn thresholds_follow_root_n(bits in bits_strategy(3, 5000)) {
        let seq = pack_bits(&bits);
        let n = bits.len() as f64;
        prop_assert_eq!(bias(&seq).unwrap().threshold, 1.5 / n.sqrt());
        if let Ok(c) = serial_correlation(&seq, 1) {
            prop_assert_eq!(c.threshold, 3.0 / n.sqrt());
            prop_assert!(c.coefficient.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn acf_is_normalized_and_bounded(x in prop::collection::vec(-1e3f64..1e3, 2..600)) {
        prop_assume!(x.iter().any(|v| *v != x[0]));
        let spec = psd_periodogram(&x, 1.0).unwrap();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        prop_assert!((spec.total_power() - var).abs() <= 1e-6 * var);
        let a = acf_from_psd(&spec).unwrap();
        prop_assert!((a.acf[0] - 1.0).abs() < 1e-12);
        prop_assert!(a.acf.iter().all(|v| v.abs() <= 1.0 + 1e-9));
    }

    #[test]
    fn quantizer_is_monotone_and_in_range(mut v in prop::collection::vec(-5.0f64..5.0, 1..500), fs in 0.1f64..4.0) {
        v.sort_by(f64::total_cmp);
        let b = quantize(&v, &AcquisitionParams::new(40e6, fs).unwrap()).unwrap();
        prop_assert!(b.codes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn decimation_keeps_every_mth(v in prop::collection::vec(-1.0f64..1.0, 0..2000), m in 1usize..40) {
        let out = decimate(&v, 40e6 * m as f64, 40e6).unwrap();
        prop_assert_eq!(out.len(), v.len() / m);
        for (i, x) in out.iter().enumerate() {
            prop_assert_eq!(*x, v[i * m]);
        }
    }

    #[test]
    fn final_bit_count_is_half_the_codes(codes in prop::collection::vec(any::<u8>(), 0..1000)) {
        let f = final_bits(&SampleBlock::new(codes.clone(), 40e6));
        prop_assert_eq!(f.len(), codes.len() / 2);
        let lsb = lsb_extract(&SampleBlock::new(codes, 40e6));
        for j in 0..f.len() {
            prop_assert_eq!(f.get(j), Some(lsb.get(2 * j).unwrap() ^ lsb.get(2 * j + 1).unwrap()));
        }
    }
}

/// An ideal source breaches the 3σ bounds about 0.27% of the time.
#[test]
fn three_sigma_exceedance_rate_for_ideal_source() {
    let runs = 1000;
    let n = 20_000;
    let mut bias_hits = 0;
    let mut corr_hits = 0;
    for seed in 0..runs {
        let mut r = Xoshiro256PlusPlus::seed_from_u64(1_000 + seed);
        let seq: BitSequence = (0..n).map(|_| r.gen::<bool>()).collect();
        bias_hits += !bias(&seq).unwrap().passed() as usize;
        corr_hits += !serial_correlation(&seq, 1).unwrap().passed() as usize;
    }
    let p = 0.003;
    let bound = (runs as f64) * (p + 3.0 * (p * (1.0 - p) / runs as f64).sqrt());
    assert!((bias_hits as f64) <= bound, "bias exceeded in {bias_hits}/{runs}");
    assert!((corr_hits as f64) <= bound, "correlation exceeded in {corr_hits}/{runs}");
}
