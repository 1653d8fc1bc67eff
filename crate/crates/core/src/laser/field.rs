use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use super::LaserParams;
use crate::error::{invalid_param, Result};

/// Steps drawn from one RNG stream before reseeding with [`chunk_seed`].
///
/// Chunk `c` of a trajectory uses `Xoshiro256PlusPlus::seed_from_u64(chunk_seed(seed, c))`
/// and consumes two standard normals per step (phase increment, then amplitude),
/// drawn with the ziggurat sampler of `rand_distr`.
pub const FIELD_CHUNK_STEPS: u64 = 1 << 16;

/// The simulation step must resolve the diffusion: `dt ≤ τ_coh / 10`.
const MIN_STEPS_PER_COHERENCE_TIME: f64 = 10.0;

const MIN_AMPLITUDE: f64 = 1e-9;

/// Seed for chunk `chunk` of the stream rooted at `seed` (SplitMix64 finalizer
/// applied to `seed + φ·(chunk + 1)`, φ the 64-bit golden-ratio constant).
pub fn chunk_seed(seed: u64, chunk: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15_u64.wrapping_mul(chunk.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sampled laser field: phase `φ(t)` and amplitude `ℰ(t)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTrajectory {
    pub dt_s: f64,
    pub phase_rad: Vec<f64>,
    pub amplitude: Vec<f64>,
}

impl FieldTrajectory {
    pub fn len(&self) -> usize {
        self.phase_rad.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phase_rad.is_empty()
    }
}

/// Streaming field simulator.
///
/// Produces the same sequence regardless of how requests are split across
/// calls to [`FieldGenerator::fill`]; the phase accumulator and the chunk
/// position are the only state carried between calls.
#[derive(Debug, Clone)]
pub struct FieldGenerator {
    seed: u64,
    phase_sigma: f64,
    amplitude_rms: f64,
    dt_s: f64,
    rng: Xoshiro256PlusPlus,
    chunk: u64,
    left_in_chunk: u64,
    phase: f64,
    steps: u64,
}

impl FieldGenerator {
    pub fn new(params: &LaserParams, dt_s: f64) -> Result<Self> {
        params.validate()?;
        if !(dt_s.is_finite() && dt_s > 0.0) {
            return Err(invalid_param(format!("dt_s must be positive, got {dt_s}")));
        }
        let tau = params.coherence_time_s();
        if dt_s > tau / MIN_STEPS_PER_COHERENCE_TIME {
            return Err(invalid_param(format!(
                "dt_s = {dt_s:e} s is too coarse: must be <= coherence time / 10 = {:e} s",
                tau / MIN_STEPS_PER_COHERENCE_TIME
            )));
        }
        Ok(Self {
            seed: params.seed,
            phase_sigma: (2.0 * std::f64::consts::PI * params.linewidth_hz * dt_s).sqrt(),
            amplitude_rms: params.amplitude_noise_rms,
            dt_s,
            rng: Xoshiro256PlusPlus::seed_from_u64(chunk_seed(params.seed, 0)),
            chunk: 0,
            left_in_chunk: FIELD_CHUNK_STEPS,
            phase: 0.0,
            steps: 0,
        })
    }

    pub fn dt_s(&self) -> f64 {
        self.dt_s
    }

    /// Standard deviation of one phase increment, `√(2π·Δν·dt)`.
    pub fn phase_step_sigma(&self) -> f64 {
        self.phase_sigma
    }

    /// Number of samples produced so far.
    pub fn position(&self) -> u64 {
        self.steps
    }

    /// Writes the next `phase.len()` samples. Both slices must have equal length.
    pub fn fill(&mut self, phase: &mut [f64], amplitude: &mut [f64]) {
        assert_eq!(phase.len(), amplitude.len());
        let mut done = 0;
        while done < phase.len() {
            if self.left_in_chunk == 0 {
                self.chunk += 1;
                self.rng = Xoshiro256PlusPlus::seed_from_u64(chunk_seed(self.seed, self.chunk));
                self.left_in_chunk = FIELD_CHUNK_STEPS;
            }
            let take = (phase.len() - done).min(self.left_in_chunk as usize);
            let ph = &mut phase[done..done + take];
            let am = &mut amplitude[done..done + take];
            for (p, a) in ph.iter_mut().zip(am.iter_mut()) {
                let zp: f64 = self.rng.sample(StandardNormal);
                let za: f64 = self.rng.sample(StandardNormal);
                *p = self.phase;
                *a = (1.0 + self.amplitude_rms * za).max(MIN_AMPLITUDE);
                self.phase += self.phase_sigma * zp;
            }
            done += take;
            self.left_in_chunk -= take as u64;
        }
        self.steps += phase.len() as u64;
    }
}

/// Simulates `n` samples of the laser field with step `dt_s`.
///
/// `phase_rad[0] = 0`; successive increments are i.i.d. `N(0, 2π·Δν·dt)`;
/// `amplitude[i] = 1 + N(0, amplitude_noise_rms)` clipped to stay positive.
pub fn simulate_field(params: &LaserParams, dt_s: f64, n: usize) -> Result<FieldTrajectory> {
    if n < 2 {
        return Err(invalid_param(format!("need at least 2 samples, got {n}")));
    }
    let mut gen = FieldGenerator::new(params, dt_s)?;
    let mut phase_rad = vec![0.0; n];
    let mut amplitude = vec![0.0; n];
    gen.fill(&mut phase_rad, &mut amplitude);
    Ok(FieldTrajectory {
        dt_s,
        phase_rad,
        amplitude,
    })
}
