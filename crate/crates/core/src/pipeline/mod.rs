//! Configuration and orchestration of simulate → acquire → extract → analyze.

mod config;
mod curves;
mod frontend;
mod run;

pub use config::{load_config, FullScale, RunConfig, DEFAULT_N_CODES, DEFAULT_SIM_RATE_HZ, KEYS, SAMPLING_MARGIN};
pub use curves::{compute_curves, emit_curves, Curves, ACF_FILE, CURVE_SAMPLES, MAX_ACF_LAG_S, PSD_FILE};
pub use frontend::AnalogFrontEnd;
pub use run::{
    acquire_codes, acquire_with, analyze_bits, analyze_file, generate_bits, run_pipeline, RunReport, Timing,
    CHUNK_CODES,
};
