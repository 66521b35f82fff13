//! Command-line front end.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 I/O or parse failure,
//! 3 rejection of the scattering data.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use crate::direct::{forward, winding_number, ScatteringSamples};
use crate::error::{Error, Result, StageExt};
use crate::io::{read_scattering_csv, sidecar_path, write_json, write_reconstruction_csv, write_scattering_csv};
use crate::numerics::{distance_mod_pi, relative_l2_error};
use crate::phase::{inverse_scatter, Diagnostics, InverseConfig, ReconstructionResult};
use crate::problem::RunConfig;
use crate::scatdata::{extract_gamma, validate_class_s, ValidationReport};
use crate::transform::PROBLEM_TAIL_THRESHOLD;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_REJECTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "miura-scatter", version, about = "Direct and inverse scattering for Schrodinger equations with energy-dependent Miura potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct Overrides {
    #[arg(long)]
    k_max: Option<f64>,
    #[arg(long)]
    n_k: Option<usize>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    n_x: Option<usize>,
    #[arg(long)]
    tol_roundtrip: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute S(k) for the problem in the config file.
    Forward {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Reconstruct (u, p, alpha) from a scattering CSV.
    Inverse {
        s_file: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Forward then inverse in memory, reporting the reconstruction errors.
    Roundtrip {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Check a scattering CSV for membership in the admissible class.
    Validate {
        s_file: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Parse(_) | Error::Io(_) => EXIT_IO,
        Error::Rejected(_) => EXIT_REJECTED,
        _ => EXIT_NUMERICAL,
    }
}

fn load_config(path: Option<&Path>, o: &Overrides) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::from_json(&fs::read_to_string(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(v) = o.k_max {
        cfg.k_max = v;
    }
    if let Some(v) = o.n_k {
        cfg.n_k = v;
    }
    if let Some(v) = o.x_max {
        cfg.problem.grid.x_max = v;
    }
    if let Some(v) = o.n_x {
        cfg.problem.grid.n = v;
    }
    if let Some(v) = o.tol_roundtrip {
        cfg.tolerances.roundtrip = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_path(flag: Option<PathBuf>, cfg: &RunConfig, default: &str) -> PathBuf {
    flag.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from(default))
}

pub fn inverse_config(cfg: &RunConfig) -> Result<InverseConfig> {
    Ok(InverseConfig { grid: cfg.x_grid()?, options: cfg.inverse, scat: cfg.scat_config() })
}

#[derive(Debug, Serialize)]
pub struct ForwardSummary {
    pub alpha: f64,
    pub beta: f64,
    pub p0: f64,
    pub gamma_estimate: Option<f64>,
    pub max_unimodularity_defect: f64,
    pub winding: Option<i64>,
    pub winding_raw: Option<f64>,
    pub masked_nodes: usize,
    pub k_max: f64,
    pub n_k: usize,
    pub x_max: f64,
    pub n_x: usize,
}

fn forward_summary(cfg: &RunConfig, s: &ScatteringSamples) -> ForwardSummary {
    let sp = cfg.problem.build().expect("validated config");
    let zp = crate::transform::to_zsakns(&sp);
    let scat = cfg.scat_config();
    let w = winding_number(s).ok();
    ForwardSummary {
        alpha: sp.alpha(),
        beta: zp.beta(),
        p0: zp.p0(),
        gamma_estimate: extract_gamma(s, scat.band_fraction, scat.spread_tol).ok().map(|g| g.gamma),
        max_unimodularity_defect: s.unimodularity_defect(),
        winding: w.as_ref().map(|w| w.winding),
        winding_raw: w.as_ref().map(|w| w.raw),
        masked_nodes: s.masked.len(),
        k_max: cfg.k_max,
        n_k: cfg.n_k,
        x_max: cfg.problem.grid.x_max,
        n_x: cfg.problem.grid.n,
    }
}

#[derive(Debug, Serialize)]
pub struct Residuals {
    pub marchenko: f64,
    pub conjugate_pair: f64,
    pub phase_ode: f64,
    pub truncation_estimate: f64,
}

#[derive(Debug, Serialize)]
pub struct ReconstructionMetadata<'a> {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub p0_estimate: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub x0: f64,
    pub contraction_ratios: &'a [f64],
    pub kernel_range: f64,
    pub validation_report: &'a ValidationReport,
}

impl<'a> ReconstructionMetadata<'a> {
    pub fn new(r: &'a ReconstructionResult) -> Self {
        let d: &Diagnostics = &r.diagnostics;
        Self {
            alpha: r.alpha,
            beta: r.beta,
            gamma: r.gamma,
            p0_estimate: r.p0_estimate(),
            residuals: Residuals {
                marchenko: d.marchenko_residual,
                conjugate_pair: d.pair_defect,
                phase_ode: d.ode_residual,
                truncation_estimate: d.truncation_estimate,
            },
            iterations: d.iterations,
            x0: d.x0,
            contraction_ratios: &d.contraction_ratios,
            kernel_range: d.kernel_range,
            validation_report: &d.validation,
        }
    }
}

/// Errors of a forward → inverse round trip.
#[derive(Debug, Serialize)]
pub struct RoundTripReport {
    pub u_error: f64,
    pub p_error: f64,
    pub alpha: f64,
    pub alpha_recovered: f64,
    pub alpha_error: f64,
    pub beta: f64,
    pub gamma: f64,
    pub max_unimodularity_defect: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub tolerance: f64,
    pub alpha_tolerance: f64,
    pub passed: bool,
}

pub fn run_roundtrip(cfg: &RunConfig) -> Result<RoundTripReport> {
    let sp = cfg.problem.build()?;
    sp.check_truncation(PROBLEM_TAIL_THRESHOLD).stage("setup")?;
    let s = forward(&sp, &cfg.k_grid()?).stage("forward")?;
    let defect = s.unimodularity_defect();
    let r = inverse_scatter(s, &inverse_config(cfg)?)?;
    let u_error = relative_l2_error(&r.u, sp.u())?;
    let p_error = relative_l2_error(&r.p, sp.p())?;
    let alpha_error = distance_mod_pi(r.alpha, sp.alpha());
    let tol = cfg.tolerances;
    let d = &r.diagnostics;
    Ok(RoundTripReport {
        u_error,
        p_error,
        alpha: sp.alpha(),
        alpha_recovered: r.alpha,
        alpha_error,
        beta: r.beta,
        gamma: r.gamma,
        max_unimodularity_defect: defect,
        residuals: Residuals {
            marchenko: d.marchenko_residual,
            conjugate_pair: d.pair_defect,
            phase_ode: d.ode_residual,
            truncation_estimate: d.truncation_estimate,
        },
        iterations: d.iterations,
        tolerance: tol.roundtrip,
        alpha_tolerance: tol.alpha,
        passed: u_error <= tol.roundtrip && p_error <= tol.roundtrip && alpha_error <= tol.alpha,
    })
}

fn cmd_forward(config: &Path, output: Option<PathBuf>, o: &Overrides) -> Result<i32> {
    let cfg = load_config(Some(config), o)?;
    let sp = cfg.problem.build()?;
    let s = forward(&sp, &cfg.k_grid()?).stage("forward")?;
    let out = output_path(output, &cfg, "scattering.csv");
    write_scattering_csv(&out, &s)?;
    write_json(&sidecar_path(&out), &forward_summary(&cfg, &s))?;
    Ok(EXIT_OK)
}

fn cmd_inverse(s_file: &Path, config: Option<&Path>, output: Option<PathBuf>, o: &Overrides) -> Result<i32> {
    let s = read_scattering_csv(s_file)?;
    let cfg = load_config(config, o)?;
    let out = output_path(output, &cfg, "reconstruction.csv");
    match inverse_scatter(s, &inverse_config(&cfg)?) {
        Ok(r) => {
            write_reconstruction_csv(&out, &r)?;
            write_json(&sidecar_path(&out), &ReconstructionMetadata::new(&r))?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            if let Error::Rejected(report) = e.root() {
                write_json(&sidecar_path(&out), report)?;
            }
            Err(e)
        }
    }
}

fn cmd_roundtrip(config: &Path, output: Option<PathBuf>, o: &Overrides) -> Result<i32> {
    let cfg = load_config(Some(config), o)?;
    let report = run_roundtrip(&cfg)?;
    write_json(&output_path(output, &cfg, "roundtrip.json"), &report)?;
    if !report.passed {
        eprintln!(
            "round trip outside tolerance: u {:.3e}, p {:.3e}, alpha {:.3e}",
            report.u_error, report.p_error, report.alpha_error
        );
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

fn cmd_validate(s_file: &Path, config: Option<&Path>, output: Option<PathBuf>) -> Result<i32> {
    let s = read_scattering_csv(s_file)?;
    let cfg = load_config(config, &Overrides::default())?;
    let report = validate_class_s(&s, &cfg.scat_config());
    println!("{}", serde_json::to_string_pretty(&report).map_err(|e| Error::Parse(e.to_string()))?);
    if let Some(out) = output {
        write_json(&out, &report)?;
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_REJECTED })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_IO } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Forward { config, output, overrides } => cmd_forward(&config, output, &overrides),
        Command::Inverse { s_file, config, output, overrides } => {
            cmd_inverse(&s_file, config.as_deref(), output, &overrides)
        }
        Command::Roundtrip { config, output, overrides } => cmd_roundtrip(&config, output, &overrides),
        Command::Validate { s_file, config, output } => cmd_validate(&s_file, config.as_deref(), output),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
