//! Run configuration.
//!
//! The config file is flat `key = value` text in TOML syntax. Every key is
//! optional; missing keys take the defaults in [`KEYS`].
//!
//! ```text
//! linewidth_hz = 200e6
//! delay_s = 10e-9
//! n_codes = 2000000
//! full_scale_v = "auto"
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::acquisition::{decimation_factor, AcquisitionParams, ADC_BITS, DEFAULT_SAMPLE_RATE_HZ};
use crate::analysis::sts::DEFAULT_BLOCK_LEN;
use crate::error::{Error, Result};
use crate::laser::{delay_steps, BandPass, FieldGenerator, FilterParams, InterferometerParams, LaserParams};

pub const DEFAULT_SIM_RATE_HZ: f64 = 6.4e9;
pub const DEFAULT_N_CODES: usize = 2_000_000;

/// Required ratio of the sampling interval to `delay + coherence time`.
pub const SAMPLING_MARGIN: f64 = 2.0;

/// Required ratio of the delay to the coherence time.
pub const DELAY_MARGIN: f64 = 5.0;

/// Recognized keys with their defaults.
pub const KEYS: [(&str, &str); 13] = [
    ("linewidth_hz", "200e6"),
    ("amplitude_noise_rms", "0.01"),
    ("seed", "0"),
    ("delay_s", "10e-9"),
    ("low_cutoff_hz", "50e3"),
    ("high_cutoff_hz", "1e9"),
    ("sim_rate_hz", "6.4e9"),
    ("sample_rate_hz", "40e6"),
    ("adc_bits", "8"),
    ("full_scale_v", "\"auto\""),
    ("n_codes", "2000000"),
    ("k_lsb", "unset"),
    ("sts_block_len", "128"),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FullScale {
    /// Three standard deviations of the first decimated samples of the run.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// `laser.seed` is ignored; the run seed is [`RunConfig::seed`].
    pub laser: LaserParams,
    pub interferometer: InterferometerParams,
    pub filter: FilterParams,
    /// Rate of the simulated analog trace; must be an integer multiple of
    /// `sample_rate_hz`.
    pub sim_rate_hz: f64,
    pub sample_rate_hz: f64,
    pub full_scale: FullScale,
    pub n_codes: usize,
    pub seed: u64,
    pub k_lsb: Option<u32>,
    pub sts_block_len: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            laser: LaserParams::default(),
            interferometer: InterferometerParams::default(),
            filter: FilterParams::default(),
            sim_rate_hz: DEFAULT_SIM_RATE_HZ,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            full_scale: FullScale::Auto,
            n_codes: DEFAULT_N_CODES,
            seed: 0,
            k_lsb: None,
            sts_block_len: DEFAULT_BLOCK_LEN,
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn as_f64(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(config_err(format!("`{key}` must be a number, got {v}"))),
    }
}

fn as_u64(key: &str, v: &toml::Value) -> Result<u64> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        // Allows `n_codes = 2e7`.
        toml::Value::Float(f) if *f >= 0.0 && f.fract() == 0.0 && *f < 9.007e15 => Ok(*f as u64),
        _ => Err(config_err(format!("`{key}` must be a non-negative integer, got {v}"))),
    }
}

impl RunConfig {
    /// Parses config text; validation is separate ([`RunConfig::validate`]).
    pub fn from_text(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| config_err(format!("not a key-value document: {e}")))?;
        let mut c = RunConfig::default();
        for (key, v) in &table {
            match key.as_str() {
                "linewidth_hz" => c.laser.linewidth_hz = as_f64(key, v)?,
                "amplitude_noise_rms" => c.laser.amplitude_noise_rms = as_f64(key, v)?,
                "seed" => c.seed = as_u64(key, v)?,
                "delay_s" => c.interferometer.delay_s = as_f64(key, v)?,
                "low_cutoff_hz" => c.filter.low_cutoff_hz = as_f64(key, v)?,
                "high_cutoff_hz" => c.filter.high_cutoff_hz = as_f64(key, v)?,
                "sim_rate_hz" => c.sim_rate_hz = as_f64(key, v)?,
                "sample_rate_hz" => c.sample_rate_hz = as_f64(key, v)?,
                "adc_bits" => {
                    let bits = as_u64(key, v)?;
                    if bits != ADC_BITS as u64 {
                        return Err(config_err(format!("adc_bits must be {ADC_BITS}, got {bits}")));
                    }
                }
                "full_scale_v" => {
                    c.full_scale = match v {
                        toml::Value::String(s) if s == "auto" => FullScale::Auto,
                        _ => FullScale::Fixed(as_f64(key, v).map_err(|_| {
                            config_err(format!("`full_scale_v` must be \"auto\" or a number, got {v}"))
                        })?),
                    }
                }
                "n_codes" => c.n_codes = as_u64(key, v)? as usize,
                "k_lsb" => c.k_lsb = Some(as_u64(key, v)? as u32),
                "sts_block_len" => c.sts_block_len = as_u64(key, v)? as usize,
                other => {
                    let valid: Vec<&str> = KEYS.iter().map(|k| k.0).collect();
                    return Err(config_err(format!(
                        "unknown key `{other}`; valid keys are: {}",
                        valid.join(", ")
                    )));
                }
            }
        }
        Ok(c)
    }

    /// The effective configuration as config text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").expect("string write");
        let f = |x: f64| format!("{x:?}");
        kv("linewidth_hz", f(self.laser.linewidth_hz));
        kv("amplitude_noise_rms", f(self.laser.amplitude_noise_rms));
        kv("seed", self.seed.to_string());
        kv("delay_s", f(self.interferometer.delay_s));
        kv("low_cutoff_hz", f(self.filter.low_cutoff_hz));
        kv("high_cutoff_hz", f(self.filter.high_cutoff_hz));
        kv("sim_rate_hz", f(self.sim_rate_hz));
        kv("sample_rate_hz", f(self.sample_rate_hz));
        kv("adc_bits", ADC_BITS.to_string());
        kv(
            "full_scale_v",
            match self.full_scale {
                FullScale::Auto => "\"auto\"".into(),
                FullScale::Fixed(v) => f(v),
            },
        );
        kv("n_codes", self.n_codes.to_string());
        if let Some(k) = self.k_lsb {
            kv("k_lsb", k.to_string());
        }
        kv("sts_block_len", self.sts_block_len.to_string());
        s
    }

    /// Laser parameters carrying the run seed.
    pub fn laser_params(&self) -> LaserParams {
        LaserParams {
            seed: self.seed,
            ..self.laser
        }
    }

    pub fn dt_s(&self) -> f64 {
        1.0 / self.sim_rate_hz
    }

    /// Analog samples per ADC sample.
    pub fn decimation(&self) -> Result<usize> {
        decimation_factor(self.sim_rate_hz, self.sample_rate_hz)
    }

    /// Acquisition parameters at the given full scale.
    pub fn acquisition(&self, full_scale_v: f64) -> Result<AcquisitionParams> {
        AcquisitionParams::new(self.sample_rate_hz, full_scale_v)
    }

    /// Checks every parameter and cross-parameter constraint.
    pub fn validate(&self) -> Result<()> {
        fn named(what: &'static str) -> impl Fn(Error) -> Error {
            move |e| config_err(format!("{what}: {e}"))
        }
        self.laser_params().validate().map_err(named("laser"))?;
        FieldGenerator::new(&self.laser_params(), self.dt_s()).map_err(named("simulation step"))?;
        delay_steps(&self.interferometer, self.dt_s()).map_err(named("interferometer"))?;
        self.filter.validate().map_err(named("filter"))?;
        BandPass::new(&self.filter, self.sim_rate_hz).map_err(named("filter"))?;
        self.decimation().map_err(named("sim_rate_hz / sample_rate_hz"))?;
        let fs = match self.full_scale {
            FullScale::Auto => 1.0,
            FullScale::Fixed(v) => v,
        };
        self.acquisition(fs).map_err(named("acquisition"))?;
        if self.n_codes == 0 || self.n_codes % 2 != 0 {
            return Err(config_err(format!(
                "n_codes must be even and positive (codes are consumed in pairs), got {}",
                self.n_codes
            )));
        }
        if let Some(k) = self.k_lsb {
            if !(2..=8).contains(&k) {
                return Err(config_err(format!("k_lsb must be in 2..=8, got {k}")));
            }
        }
        if self.sts_block_len == 0 {
            return Err(config_err("sts_block_len must be positive"));
        }
        Ok(())
    }

    /// Physically questionable but runnable settings.
    pub fn warnings(&self) -> Vec<String> {
        let tau_coh = self.laser.coherence_time_s();
        let tau = self.interferometer.delay_s;
        let dt = 1.0 / self.sample_rate_hz;
        let mut w = Vec::new();
        if dt < SAMPLING_MARGIN * (tau + tau_coh) {
            w.push(format!(
                "sampling interval {:.3e} s is below {SAMPLING_MARGIN}·(delay + coherence time) = {:.3e} s; \
                 consecutive samples will be correlated",
                dt,
                SAMPLING_MARGIN * (tau + tau_coh)
            ));
        }
        if tau < DELAY_MARGIN * tau_coh {
            w.push(format!(
                "delay {tau:.3e} s is below {DELAY_MARGIN}·coherence time = {:.3e} s; \
                 the beat signal keeps a coherent component",
                DELAY_MARGIN * tau_coh
            ));
        }
        w
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let c = RunConfig::from_text(&text)?;
    c.validate()?;
    Ok(c)
}
