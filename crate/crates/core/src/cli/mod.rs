//! Command-line front end: config ingestion, pipeline run, CSV and text
//! outputs, exit codes.

pub mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{self, AnalysisConfig, AnalysisError};
use crate::flow::SweepOptions;
use crate::ite::IteOptions;
use crate::media::{Media, RadialDomain};
use crate::symbols::{self, build_frame, sampled_sigma};

pub use config::{ConfigError, RunConfig, SampleSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_GATE: i32 = 2;
pub const EXIT_CONSISTENCY: i32 = 3;

/// Command-line overrides of config values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub lambda_max: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub strict: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(l) = self.lambda_max {
            cfg.lambda_max = l;
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = Some(d.clone());
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub message: String,
}

impl Outcome {
    fn new(exit_code: i32, message: impl Into<String>) -> Self {
        Self { exit_code, message: message.into() }
    }
}

fn output_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("ite-output"))
}

pub fn analysis_config(cfg: &RunConfig, strict: bool) -> Result<AnalysisConfig, ConfigError> {
    let (a, n) = cfg.validate_run()?;
    let bad = |e: crate::media::MediaError| ConfigError { line: None, message: e.to_string() };
    let media = Media::new(a, n, cfg.d).map_err(bad)?;
    let domain = RadialDomain::new(cfg.radius, cfg.obstacle).map_err(bad)?;
    let mut ac = AnalysisConfig::new(media, domain, cfg.lambda_max);
    ac.grid_points = cfg.grid_points;
    ac.sweep = SweepOptions {
        zero_tol: cfg.zero_tol,
        pole_tol: cfg.pole_tol,
        root_tol: cfg.root_tol,
        samples_per_pi: cfg.samples_per_pi,
        mode_cap: cfg.mode_cap,
        strict,
        ..SweepOptions::default()
    };
    ac.ite = IteOptions { zero_tol: cfg.zero_tol, root_tol: cfg.root_tol, ..IteOptions::default() };
    Ok(ac)
}

/// Full pipeline for a parsed config; writes every output file.
pub fn run(cfg: &RunConfig, strict: bool) -> Outcome {
    let ac = match analysis_config(cfg, strict) {
        Ok(ac) => ac,
        Err(e) => return Outcome::new(EXIT_CONFIG, format!("config error: {e}")),
    };
    let dir = output_dir(cfg);
    if let Err(e) = fs::create_dir_all(&dir) {
        return Outcome::new(EXIT_CONFIG, format!("cannot create {}: {e}", dir.display()));
    }
    let header = output::header(cfg);
    let result = analysis::analyze(&ac);
    let written = match &result {
        Ok(out) => output::write_all(&dir, &header, &ac, out),
        Err(e) => output::write_failure(&dir, &header, e),
    };
    if let Err(e) = written {
        return Outcome::new(EXIT_CONSISTENCY, format!("cannot write outputs to {}: {e}", dir.display()));
    }
    match result {
        Ok(out) if out.all_hold() => Outcome::new(EXIT_OK, format!("ok: outputs in {}", dir.display())),
        Ok(_) => Outcome::new(EXIT_CONSISTENCY, "a bound check was violated; see bounds_report.csv"),
        Err(e) => Outcome::new(exit_for(&e), e.to_string()),
    }
}

fn exit_for(e: &AnalysisError) -> i32 {
    match e.exit_code() {
        1 => EXIT_CONFIG,
        2 => EXIT_GATE,
        _ => EXIT_CONSISTENCY,
    }
}

/// One row of the `symbols` subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolRow {
    pub index: usize,
    pub line: usize,
    pub d: usize,
    pub elliptic: bool,
    pub sigma: Option<i8>,
    pub sampled_sigma: Option<i8>,
    pub discrete_ok: bool,
    pub gap_det: f64,
}

pub fn symbol_rows(cfg: &RunConfig) -> Result<Vec<SymbolRow>, ConfigError> {
    cfg.samples
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let sample = spec.to_sample()?;
            let v = symbols::check_ellipticity(&sample);
            Ok(SymbolRow {
                index: i + 1,
                line: spec.line,
                d: sample.dim(),
                elliptic: v.elliptic,
                sigma: v.sigma,
                sampled_sigma: sampled_sigma(&build_frame(&sample), 64),
                discrete_ok: v.discrete_ok,
                gap_det: v.gap_det,
            })
        })
        .collect()
}

/// Verdict table for the config's boundary samples; printed, and written to
/// `symbols.csv` when an output directory is configured.
pub fn symbols(cfg: &RunConfig) -> Outcome {
    let rows = match symbol_rows(cfg) {
        Ok(r) => r,
        Err(e) => return Outcome::new(EXIT_CONFIG, format!("config error: {e}")),
    };
    let table = output::symbols_csv(&output::header(cfg), &rows);
    if let Some(dir) = &cfg.output_dir {
        if let Err(e) = fs::create_dir_all(dir).and_then(|_| fs::write(dir.join("symbols.csv"), &table)) {
            return Outcome::new(EXIT_CONFIG, format!("cannot write symbols.csv: {e}"));
        }
    }
    Outcome::new(EXIT_OK, table)
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig, Outcome> {
    let mut cfg = config::load(path).map_err(|e| Outcome::new(EXIT_CONFIG, format!("{}: {e}", path.display())))?;
    overrides.apply(&mut cfg);
    Ok(cfg)
}
