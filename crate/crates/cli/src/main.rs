use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use phase_trng::analysis::{multi_lsb_experiment, sts::DEFAULT_BLOCK_LEN, MultiLsbResult};
use phase_trng::extraction::write_bits;
use phase_trng::pipeline::{
    acquire_codes, analyze_file, emit_curves, load_config, run_pipeline, RunConfig, RunReport,
};
use phase_trng::synthetic::narrow_gaussian_codes;

/// Exit status when a randomness criterion fails.
const EXIT_CRITERION_FAILED: u8 = 1;
/// Exit status for usage, configuration and I/O errors.
const EXIT_USAGE: u8 = 2;

const DEFAULT_K: u32 = 5;

#[derive(Parser)]
#[command(name = "phase-trng", version, about = "Laser phase-noise random bit generator simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Flat key = value config file; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `n_codes` from the config (must be even).
    #[arg(long)]
    n_codes: Option<usize>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => load_config(p).with_context(|| format!("loading {}", p.display()))?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.n_codes {
            cfg.n_codes = n;
        }
        cfg.validate()?;
        for w in cfg.warnings() {
            log::warn!("{w}");
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct ReportArgs {
    /// Text report path; printed to stdout when absent.
    #[arg(long)]
    out_report: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    /// Codes from the simulated pipeline.
    Pipeline,
    /// Zero-mean Gaussian a few LSB wide through the standard quantizer.
    NarrowGaussian,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate, acquire, extract and analyze.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Packed bit file to write.
        #[arg(long)]
        out_bits: Option<PathBuf>,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Analyze an existing packed bit file.
    Analyze {
        #[arg(long)]
        bits: PathBuf,
        /// Number of bits in the file (not stored in the file itself).
        #[arg(long)]
        bit_len: usize,
        #[arg(long, default_value_t = DEFAULT_BLOCK_LEN)]
        sts_block_len: usize,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Write beat-signal spectrum and autocorrelation files.
    Curves {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Correlation among the k low bits of each code versus the final bits.
    ExperimentKlsb {
        #[command(flatten)]
        config: ConfigArgs,
        /// Bits per code; defaults to `k_lsb` from the config, else 5.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, value_enum, default_value = "pipeline")]
        source: Source,
        /// Standard deviation in LSB for the narrow-gaussian source.
        #[arg(long, default_value_t = 4.0)]
        sigma_lsb: f64,
        /// Text report path; printed to stdout when absent.
        #[arg(long)]
        out_report: Option<PathBuf>,
    },
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(report: &RunReport, args: &ReportArgs) -> Result<()> {
    let text = report.to_text();
    match &args.out_report {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = &args.out_json {
        write(p, &report.to_json())?;
    }
    for f in report.tests.failures() {
        log::warn!("failed: {}", f.name);
    }
    Ok(())
}

fn verdict(report: &RunReport) -> u8 {
    if report.all_passed() {
        0
    } else {
        EXIT_CRITERION_FAILED
    }
}

fn klsb_text(r: &MultiLsbResult) -> String {
    let mut s = format!("# k = {}, codes = {}\n", r.k, r.n_codes);
    for (i, j, c) in &r.pair_correlations {
        s.push_str(&format!("pair_{i}_{j} {c:.6e}\n"));
    }
    s.push_str(&format!(
        "within_group_corr {:.6e} threshold {:.6e}\n",
        r.within_group_corr, r.within_group_threshold
    ));
    s.push_str(&format!(
        "baseline_corr {:.6e} threshold {:.6e}\n",
        r.baseline_corr, r.baseline_threshold
    ));
    s.push_str(&format!("ratio {:.3}\n", r.ratio()));
    s.push_str(&format!("k_lsb_frequency_p {:.6}\n", r.k_lsb_frequency_p));
    s.push_str(&format!("final_frequency_p {:.6}\n", r.final_frequency_p));
    s
}

fn execute(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Run {
            config,
            out_bits,
            report,
        } => {
            let cfg = config.load()?;
            let (bits, r) = run_pipeline(&cfg)?;
            if let Some(p) = &out_bits {
                write_bits(&bits, p)?;
            }
            emit(&r, &report)?;
            Ok(verdict(&r))
        }
        Command::Analyze {
            bits,
            bit_len,
            sts_block_len,
            report,
        } => {
            let r = analyze_file(&bits, bit_len, sts_block_len)?;
            emit(&r, &report)?;
            Ok(verdict(&r))
        }
        Command::Curves { config, out_dir } => {
            let cfg = config.load()?;
            let (psd, acf) = emit_curves(&cfg, &out_dir)?;
            println!("{}\n{}", psd.display(), acf.display());
            Ok(0)
        }
        Command::ExperimentKlsb {
            config,
            k,
            source,
            sigma_lsb,
            out_report,
        } => {
            let cfg = config.load()?;
            let k = k.or(cfg.k_lsb).unwrap_or(DEFAULT_K);
            let block = match source {
                Source::Pipeline => acquire_codes(&cfg)?,
                Source::NarrowGaussian => narrow_gaussian_codes(cfg.n_codes, sigma_lsb, cfg.seed)?,
            };
            let r = multi_lsb_experiment(&block, k)?;
            let text = klsb_text(&r);
            match &out_report {
                Some(p) => write(p, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
