//! Library estimators against independent reference computations.

use phase_trng::analysis::{acf_direct, acf_from_psd, psd_periodogram};
use phase_trng::laser::{simulate_field, LaserParams};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Circular autocovariance by the textbook double sum, normalized at lag 0.
fn reference_acf(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let r: Vec<f64> = (0..=n / 2)
        .map(|m| (0..n).map(|i| c[i] * c[(i + m) % n]).sum())
        .collect();
    r.iter().map(|v| v / r[0]).collect()
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn colored_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut r = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut prev = 0.0;
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut r);
            prev = 0.7 * prev + z + 5.0;
            prev
        })
        .collect()
}

#[test]
fn spectral_acf_matches_double_sum() {
    for (n, seed) in [(256, 1), (1024, 2), (4096, 3), (999, 4)] {
        let x = colored_noise(n, seed);
        let fast = acf_from_psd(&psd_periodogram(&x, 1e6).unwrap()).unwrap();
        let want = reference_acf(&x);
        assert_eq!(fast.acf.len(), want.len());
        let e = rel_l2(&fast.acf, &want);
        assert!(e < 1e-10, "n = {n}: relative L2 error {e:e}");

        let direct = acf_direct(&x, n / 2, 1e6).unwrap();
        assert!(rel_l2(&direct.acf, &want) < 1e-12);
        assert_eq!(direct.lags_s, fast.lags_s);
    }
}

#[test]
fn colored_noise_acf_follows_ar1_decay() {
    let x = colored_noise(1 << 16, 9);
    let a = acf_from_psd(&psd_periodogram(&x, 1.0).unwrap()).unwrap();
    for k in 1..6 {
        assert!((a.acf[k] - 0.7f64.powi(k as i32)).abs() < 0.02, "lag {k}: {}", a.acf[k]);
    }
}

#[test]
fn phase_increments_are_gaussian_with_wiener_variance() {
    let p = LaserParams {
        linewidth_hz: 200e6,
        amplitude_noise_rms: 0.0,
        seed: 17,
    };
    let dt = 1e-10;
    let t = simulate_field(&p, dt, 400_001).unwrap();
    let d: Vec<f64> = t.phase_rad.windows(2).map(|w| w[1] - w[0]).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let want = 2.0 * std::f64::consts::PI * 200e6 * dt;
    assert!((var / want - 1.0).abs() < 0.01, "{var} vs {want}");
    let kurt = d.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n / (var * var);
    assert!((kurt - 3.0).abs() < 0.05, "kurtosis {kurt}");
    // Independent increments.
    let c1 = d.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / n / var;
    assert!(c1.abs() < 0.01);
}
