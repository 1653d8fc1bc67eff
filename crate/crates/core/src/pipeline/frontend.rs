use crate::error::Result;
use crate::laser::{BandPass, BeatStream, FieldGenerator, FILTER_WARMUP_SAMPLES};

use super::config::RunConfig;

/// Decimated samples produced per pass through the scratch buffer.
const OUTPUTS_PER_BLOCK: usize = 512;

/// Streaming source of detector voltages: beat signal, band-pass, then point
/// sampling every `decimation` analog steps.
///
/// Output depends only on the config and the total number of samples drawn,
/// never on how the requests are split.
pub struct AnalogFrontEnd {
    beat: BeatStream,
    filter: BandPass,
    decimation: usize,
    sim_rate_hz: f64,
    scratch: Vec<f64>,
}

impl AnalogFrontEnd {
    /// The filter warm-up transient is consumed here.
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let field = FieldGenerator::new(&cfg.laser_params(), cfg.dt_s()).map_err(|e| e.in_stage("simulate"))?;
        let beat = BeatStream::new(field, &cfg.interferometer).map_err(|e| e.in_stage("interfere"))?;
        let filter = BandPass::new(&cfg.filter, cfg.sim_rate_hz).map_err(|e| e.in_stage("filter"))?;
        let decimation = cfg.decimation().map_err(|e| e.in_stage("decimate"))?;
        let mut fe = Self {
            beat,
            filter,
            decimation,
            sim_rate_hz: cfg.sim_rate_hz,
            scratch: vec![0.0; decimation * OUTPUTS_PER_BLOCK],
        };
        let mut warm = vec![0.0; FILTER_WARMUP_SAMPLES];
        fe.fill_analog(&mut warm);
        Ok(fe)
    }

    pub fn decimation(&self) -> usize {
        self.decimation
    }

    pub fn sim_rate_hz(&self) -> f64 {
        self.sim_rate_hz
    }

    /// Filtered analog trace at the simulation rate.
    pub fn fill_analog(&mut self, out: &mut [f64]) {
        let filter = &mut self.filter;
        self.beat.fill_map(out, |v| filter.process(v));
    }

    /// Filtered trace sampled at the ADC rate.
    pub fn fill_sampled(&mut self, out: &mut [f64]) {
        let m = self.decimation;
        let Self {
            beat,
            filter,
            scratch,
            ..
        } = self;
        for block in out.chunks_mut(OUTPUTS_PER_BLOCK) {
            let analog = &mut scratch[..block.len() * m];
            beat.fill_map(analog, |v| filter.process(v));
            for (o, s) in block.iter_mut().zip(analog.iter().step_by(m)) {
                *o = *s;
            }
        }
    }

    pub fn sampled(&mut self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        self.fill_sampled(&mut v);
        v
    }
}
