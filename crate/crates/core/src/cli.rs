//! Command-line front end: `eval`, `sweep`, `peaks` and `verify`.
//!
//! Exit codes: 0 success, 1 invalid input or failed verification,
//! 2 a numeric guard stopped the computation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::beam_model::{ModelKind, OutputKind, Violation};
use crate::config::{self, ConfigError, RunConfig};
use crate::error::Error;
use crate::numeric::NumericPolicy;
use crate::response::{self, s_of_hz, ModalPeak, Response, SampleStatus, Spacing, TransferSample};
use crate::verification::{self, ResidualReport, H2_TOL, RESIDUAL_TOL};

pub const SWEEP_HEADER: &str = "nu_hz,re_h,im_h,mag,mag_db,phase_rad,status";
pub const PEAKS_HEADER: &str = "mode,nu_hz,mag";

/// Seed of the frequencies drawn by `verify`.
pub const VERIFY_SEED: u64 = 0x6265_616d;
pub const VERIFY_SAMPLES: usize = 10;
pub const VERIFY_RANGE: (f64, f64) = (1.0, 250.0);

#[derive(Debug, Parser)]
#[command(name = "beamtf", version, about = "Transfer functions of a pinned beam with a spring-mass-damper attachment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate H at one frequency and print a CSV row.
    Eval {
        /// Frequency in Hz.
        #[arg(long)]
        nu: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Sample H on a frequency grid and write CSV.
    Sweep {
        /// Frequency range in Hz.
        #[arg(long, value_name = "LO:HI", value_parser = parse_range)]
        range: Option<(f64, f64)>,
        #[arg(long, value_name = "N")]
        points: Option<usize>,
        #[arg(long, value_name = "linear|log")]
        spacing: Option<Spacing>,
        #[command(flatten)]
        common: Common,
    },
    /// Locate the resonance peaks of |H|.
    Peaks {
        #[arg(long, value_name = "LO:HI", value_parser = parse_range)]
        range: Option<(f64, f64)>,
        /// Points of the coarse scan that brackets each peak.
        #[arg(long, value_name = "N")]
        points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check residuals of the closed-form solution at seeded random frequencies.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML configuration; the built-in reference beam when omitted.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "timoshenko|euler")]
    pub model: Option<ModelKind>,
    #[arg(long, value_name = "displacement|curvature")]
    pub output: Option<OutputKind>,
    /// Damping values in N*s/m; several give one output per value.
    #[arg(long, value_name = "D[,D...]", value_delimiter = ',')]
    pub damping: Vec<f64>,
    /// Override a configuration entry, e.g. `beam.area=2 cm^2`.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_kv)]
    pub set: Vec<(String, String)>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
    Ok((lo, hi))
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    Ok((k.trim().to_owned(), v.trim().to_owned()))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(e) if e.is_numeric_guard() => 2,
            _ => 1,
        }
    }
}

/// What a command produced: text for stdout plus a possible warning.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub warnings: Vec<String>,
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => config::load_config(path, &common.set)?,
        None => config::parse_config(config::DEFAULT_CONFIG, &common.set)?,
    };
    if let Some(m) = common.model {
        cfg.model = m;
    }
    if let Some(k) = common.output {
        cfg.kind = k;
    }
    if !common.damping.is_empty() {
        cfg.params.damping = common.damping[0];
        cfg.compare = (common.damping.len() > 1).then(|| common.damping.clone());
    }
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    let v: Vec<Violation> = config::validate(&cfg);
    if !v.is_empty() {
        return Err(ConfigError::Validation(v).into());
    }
    Ok(cfg)
}

/// Twelve significant digits in scientific notation.
fn num(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn sample_row(s: &TransferSample) -> String {
    match &s.value {
        Some(r) => format!(
            "{},{},{},{},{},{},{}",
            num(s.nu),
            num(r.h.re),
            num(r.h.im),
            num(r.mag),
            num(r.mag_db),
            num(r.phase),
            s.status
        ),
        None => format!("{},,,,,,{}", num(s.nu), s.status),
    }
}

pub fn sweep_csv(samples: &[TransferSample]) -> String {
    let mut out = String::with_capacity(96 * (samples.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&sample_row(s));
        out.push('\n');
    }
    out
}

pub fn peaks_csv(peaks: &[ModalPeak]) -> String {
    let mut out = String::from(PEAKS_HEADER);
    out.push('\n');
    for (i, p) in peaks.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, num(p.nu_peak), num(p.mag_peak));
    }
    out
}

/// `out.csv` becomes `out_d1.csv` for damping 1.
pub fn damping_path(base: &Path, d: f64) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_d{d}.{ext}"),
        None => format!("{stem}_d{d}"),
    };
    base.with_file_name(name)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Sends one document per damping value to files or stdout.
fn emit(cfg: &RunConfig, docs: Vec<(f64, String)>, out: &mut Outcome) -> Result<(), CliError> {
    let several = docs.len() > 1;
    for (d, text) in docs {
        match &cfg.out {
            Some(base) => {
                let path = if several { damping_path(base, d) } else { base.clone() };
                write_file(&path, &text)?;
            }
            None => {
                if several {
                    let _ = writeln!(out.stdout, "# damping = {d} N*s/m");
                }
                out.stdout.push_str(&text);
            }
        }
    }
    Ok(())
}

fn cmd_eval(cfg: &RunConfig, nu: f64, policy: &NumericPolicy) -> Result<Outcome, CliError> {
    let p = &cfg.params;
    let dp = p.derive();
    // a guard here is an error, unlike in a sweep
    let v = response::transfer(cfg.model, p, &dp, s_of_hz(nu), p.ellk, cfg.kind, policy)?;
    let status = if v.perturbed { SampleStatus::Perturbed } else { SampleStatus::Ok };
    let s = TransferSample { nu, status, value: Some(Response::new(v.h)) };
    Ok(Outcome { stdout: format!("{}\n", sample_row(&s)), warnings: Vec::new() })
}

fn cmd_sweep(cfg: &RunConfig, policy: &NumericPolicy) -> Result<Outcome, CliError> {
    let spec = cfg.sweep_spec();
    let mut docs = Vec::new();
    for d in cfg.dampings() {
        let p = cfg.params.with_damping(d);
        let samples = response::sweep(&spec, &p, &p.derive(), p.ellk, policy)?;
        docs.push((d, sweep_csv(&samples)));
    }
    let mut out = Outcome::default();
    emit(cfg, docs, &mut out)?;
    Ok(out)
}

fn cmd_peaks(cfg: &RunConfig, policy: &NumericPolicy) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let mut docs = Vec::new();
    for d in cfg.dampings() {
        let p = cfg.params.with_damping(d);
        let dp = p.derive();
        let peaks =
            match response::find_peaks(cfg.model, cfg.kind, &p, &dp, p.ellk, cfg.peak_range, cfg.coarse_points, policy) {
                Ok(v) => v,
                Err(Error::EmptyRange { lo, hi }) => {
                    out.warnings.push(format!("no peak in [{lo}, {hi}] Hz for damping {d}"));
                    Vec::new()
                }
                Err(e) => return Err(e.into()),
            };
        for pk in peaks.iter().filter(|pk| !pk.refined) {
            out.warnings.push(format!("peak near {} Hz was not refined to full width", pk.nu_peak));
        }
        docs.push((d, peaks_csv(&peaks)));
    }
    emit(cfg, docs, &mut out)?;
    Ok(out)
}

/// Frequencies used by `verify`, identical on every run.
pub fn verify_frequencies() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);
    let (lo, hi) = VERIFY_RANGE;
    (0..VERIFY_SAMPLES).map(|_| rng.gen_range(lo..hi)).collect()
}

fn cmd_verify(cfg: &RunConfig, policy: &NumericPolicy) -> Result<Outcome, CliError> {
    let p = &cfg.params;
    let dp = p.derive();
    let mut text = String::new();
    let mut worst: f64 = 0.0;
    let mut worst_h2: f64 = 0.0;
    let _ = writeln!(text, "model,nu_hz,ode,bc,interface");
    for model in [ModelKind::Timoshenko, ModelKind::EulerBernoulli] {
        for nu in verify_frequencies() {
            let r: ResidualReport = verification::residual_check(model, p, &dp, s_of_hz(nu), p.ellk, policy)?;
            worst = worst.max(r.max());
            let _ = writeln!(text, "{model},{nu:.6},{:.3e},{:.3e},{:.3e}", r.ode, r.bc, r.interface);
        }
    }
    for nu in verify_frequencies() {
        worst_h2 = worst_h2.max(verification::h2_consistency(p, &dp, s_of_hz(nu), p.ellk, policy)?);
    }
    let _ = writeln!(text, "max residual {worst:.3e} (limit {RESIDUAL_TOL:.0e})");
    let _ = writeln!(text, "max h2 deviation {worst_h2:.3e} (limit {H2_TOL:.0e})");
    let ok = worst <= RESIDUAL_TOL && worst_h2 <= H2_TOL;
    let _ = writeln!(text, "{}", if ok { "PASS" } else { "FAIL" });
    if !ok {
        return Err(CliError::Verification(text));
    }
    Ok(Outcome { stdout: text, warnings: Vec::new() })
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let policy = NumericPolicy::default();
    match &cli.command {
        Command::Eval { nu, common } => cmd_eval(&load(common)?, *nu, &policy),
        Command::Sweep { range, points, spacing, common } => {
            let mut cfg = load(common)?;
            if let Some((lo, hi)) = *range {
                cfg.nu_min = lo;
                cfg.nu_max = hi;
            }
            if let Some(n) = *points {
                cfg.points = n;
            }
            if let Some(s) = *spacing {
                cfg.spacing = s;
            }
            cmd_sweep(&cfg, &policy)
        }
        Command::Peaks { range, points, common } => {
            let mut cfg = load(common)?;
            if let Some(r) = *range {
                cfg.peak_range = r;
            }
            if let Some(n) = *points {
                cfg.coarse_points = n;
            }
            cmd_peaks(&cfg, &policy)
        }
        Command::Verify { common } => cmd_verify(&load(common)?, &policy),
    }
}
