use super::{trig, FieldGenerator, FieldTrajectory, InterferometerParams};
use crate::error::{invalid_param, Result};

const STREAM_BLOCK: usize = 1 << 14;

/// Delay expressed as a whole number of simulation steps, `round(delay/dt) ≥ 1`.
pub fn delay_steps(ifm: &InterferometerParams, dt_s: f64) -> Result<usize> {
    if !(ifm.delay_s.is_finite() && ifm.delay_s > 0.0) {
        return Err(invalid_param(format!(
            "delay_s must be positive, got {}",
            ifm.delay_s
        )));
    }
    let d = (ifm.delay_s / dt_s).round();
    if d < 1.0 {
        return Err(invalid_param(format!(
            "delay {} s is shorter than half a simulation step ({dt_s} s)",
            ifm.delay_s
        )));
    }
    Ok(d as usize)
}

#[inline(always)]
fn beat(a0: f64, a1: f64, p0: f64, p1: f64) -> f64 {
    2.0 * a0 * a1 * trig::cos(p0 - p1)
}

/// AC photocurrent of the delayed self-homodyne interferometer:
/// `out[i] = 2·ℰ[i]·ℰ[i+d]·cos(φ[i] − φ[i+d])`, length `len − d`.
pub fn beat_voltage(traj: &FieldTrajectory, ifm: &InterferometerParams) -> Result<Vec<f64>> {
    let d = delay_steps(ifm, traj.dt_s)?;
    if traj.len() <= d {
        return Err(invalid_param(format!(
            "trajectory of {} samples is not longer than the delay of {d} steps",
            traj.len()
        )));
    }
    let n = traj.len() - d;
    let (p, a) = (&traj.phase_rad, &traj.amplitude);
    Ok(p[..n]
        .iter()
        .zip(&p[d..])
        .zip(a[..n].iter().zip(&a[d..]))
        .map(|((&p0, &p1), (&a0, &a1))| beat(a0, a1, p0, p1))
        .collect())
}

/// Streaming form of [`beat_voltage`] over a [`FieldGenerator`].
///
/// Sample `i` of the stream equals `beat_voltage(simulate_field(..))[i]` for
/// the same parameters, independent of how the output is requested.
#[derive(Debug, Clone)]
pub struct BeatStream {
    field: FieldGenerator,
    delay: usize,
    phase: Vec<f64>,
    amplitude: Vec<f64>,
}

impl BeatStream {
    pub fn new(mut field: FieldGenerator, ifm: &InterferometerParams) -> Result<Self> {
        let delay = delay_steps(ifm, field.dt_s())?;
        let mut phase = vec![0.0; delay + STREAM_BLOCK];
        let mut amplitude = vec![0.0; delay + STREAM_BLOCK];
        field.fill(&mut phase[..delay], &mut amplitude[..delay]);
        Ok(Self {
            field,
            delay,
            phase,
            amplitude,
        })
    }

    pub fn delay_steps(&self) -> usize {
        self.delay
    }

    pub fn dt_s(&self) -> f64 {
        self.field.dt_s()
    }

    /// Fills `out` with the next beat samples.
    pub fn fill(&mut self, out: &mut [f64]) {
        self.fill_map(out, |v| v);
    }

    /// Fills `out` with `post(v)` for each next beat sample `v`, in order.
    pub fn fill_map(&mut self, out: &mut [f64], mut post: impl FnMut(f64) -> f64) {
        let d = self.delay;
        for block in out.chunks_mut(STREAM_BLOCK) {
            let b = block.len();
            self.field
                .fill(&mut self.phase[d..d + b], &mut self.amplitude[d..d + b]);
            let (p0, p1) = (&self.phase[..b], &self.phase[d..d + b]);
            let (a0, a1) = (&self.amplitude[..b], &self.amplitude[d..d + b]);
            for (o, (((&p0, &p1), &a0), &a1)) in block
                .iter_mut()
                .zip(p0.iter().zip(p1).zip(a0).zip(a1))
            {
                *o = beat(a0, a1, p0, p1);
            }
            for o in block.iter_mut() {
                *o = post(*o);
            }
            self.phase.copy_within(b..b + d, 0);
            self.amplitude.copy_within(b..b + d, 0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laser::{simulate_field, LaserParams};

    fn flat(n: usize, phase: impl Fn(usize) -> f64) -> FieldTrajectory {
        FieldTrajectory {
            dt_s: 1e-10,
            phase_rad: (0..n).map(phase).collect(),
            amplitude: vec![1.0; n],
        }
    }

    #[test]
    fn constant_phase_gives_plus_two() {
        let t = flat(500, |_| 0.3);
        let v = beat_voltage(&t, &InterferometerParams { delay_s: 10e-9 }).unwrap();
        assert_eq!(v.len(), 400);
        assert!(v.iter().all(|&x| (x - 2.0).abs() < 1e-15));
    }

    #[test]
    fn pi_shift_gives_minus_two() {
        // φ advances by π every 100 steps, i.e. exactly one delay.
        let t = flat(1000, |i| std::f64::consts::PI * i as f64 / 100.0);
        let v = beat_voltage(&t, &InterferometerParams { delay_s: 10e-9 }).unwrap();
        assert!(v.iter().all(|&x| (x + 2.0).abs() < 1e-9));
    }

    #[test]
    fn short_trajectory_rejected() {
        let t = flat(100, |_| 0.0);
        assert!(beat_voltage(&t, &InterferometerParams { delay_s: 10e-9 }).is_err());
        assert!(beat_voltage(&t, &InterferometerParams { delay_s: 1e-12 }).is_err());
    }

    #[test]
    fn long_delay_beat_statistics() {
        // τ = 10·τ_coh; mean of 2cos(Δφ) → 2·exp(−10) ≈ 0, variance → 2.
        let lp = LaserParams {
            linewidth_hz: 200e6,
            amplitude_noise_rms: 0.0,
            seed: 77,
        };
        let tau = 10.0 * lp.coherence_time_s();
        let t = simulate_field(&lp, 1e-10, 4_000_000).unwrap();
        let v = beat_voltage(&t, &InterferometerParams { delay_s: tau }).unwrap();
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        assert!(m.abs() < 0.03, "mean {m}");
        assert!((var - 2.0).abs() / 2.0 < 0.02, "var {var}");
    }

    #[test]
    fn stream_matches_batch() {
        let lp = LaserParams {
            seed: 4,
            ..Default::default()
        };
        let ifm = InterferometerParams::default();
        let t = simulate_field(&lp, 1e-10, 100_100).unwrap();
        let batch = beat_voltage(&t, &ifm).unwrap();
        let mut s = BeatStream::new(FieldGenerator::new(&lp, 1e-10).unwrap(), &ifm).unwrap();
        let mut out = vec![0.0; batch.len()];
        let (a, b) = out.split_at_mut(33_333);
        s.fill(a);
        s.fill(b);
        assert_eq!(out, batch);
    }

    #[test]
    fn beat_is_bounded() {
        let lp = LaserParams {
            amplitude_noise_rms: 0.05,
            seed: 8,
            ..Default::default()
        };
        let t = simulate_field(&lp, 1e-10, 200_000).unwrap();
        let amax = t.amplitude.iter().cloned().fold(0.0, f64::max);
        let v = beat_voltage(&t, &InterferometerParams::default()).unwrap();
        assert!(v.iter().all(|x| x.abs() <= 2.0 * amax * amax));
    }
}
