//! Plain-text run configuration.
//!
//! ```text
//! # comment
//! a = 0.5
//! n = 0.25
//! radius = 1
//! obstacle = 0
//! lambda_max = 200
//!
//! [sample]
//! A = 2 0 0; 0 3 0; 0 0 4
//! nu = 0 0 1
//! n = 1.5
//! ```
//!
//! Top-level keys are flat `key = value` pairs. Each `[sample]` header opens
//! one boundary sample for the `symbols` subcommand.

use std::fmt;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};

use crate::specfun::MAX_ARG;
use crate::symbols::BoundarySample;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line, when the problem can be pinned to one.
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }

    fn global(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// One `[sample]` section.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpec {
    pub line: usize,
    pub matrix: Vec<Vec<f64>>,
    pub nu: Vec<f64>,
    pub n0: f64,
}

impl SampleSpec {
    pub fn to_sample(&self) -> Result<BoundarySample, ConfigError> {
        let d = self.matrix.len();
        if self.matrix.iter().any(|row| row.len() != d) {
            return Err(ConfigError::at(self.line, "A must be square"));
        }
        let flat: Vec<f64> = self.matrix.iter().flatten().copied().collect();
        let a0 = DMatrix::from_row_slice(d, d, &flat);
        BoundarySample::new(a0, DVector::from_vec(self.nu.clone()), self.n0)
            .map_err(|e| ConfigError::at(self.line, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub a: Option<f64>,
    pub n: Option<f64>,
    pub d: u32,
    pub radius: f64,
    pub obstacle: f64,
    pub lambda_max: f64,
    pub grid_points: usize,
    pub mode_cap: Option<u32>,
    pub zero_tol: f64,
    pub pole_tol: f64,
    pub root_tol: f64,
    pub samples_per_pi: usize,
    pub output_dir: Option<PathBuf>,
    pub samples: Vec<SampleSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            a: None,
            n: None,
            d: 2,
            radius: 1.0,
            obstacle: 0.0,
            lambda_max: 200.0,
            grid_points: 500,
            mode_cap: None,
            zero_tol: 1e-9,
            pole_tol: 1e-8,
            root_tol: 1e-13,
            samples_per_pi: 32,
            output_dir: None,
            samples: Vec::new(),
        }
    }
}

fn number(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| ConfigError::at(line, format!("{key}: '{v}' is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError::at(line, format!("{key}: '{v}' is not finite")))
    }
}

fn integer<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError::at(line, format!("{key}: '{v}' is not a non-negative integer")))
}

fn vector(line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    let out: Vec<f64> = v.split_whitespace().map(|t| number(line, key, t)).collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(ConfigError::at(line, format!("{key}: empty vector")));
    }
    Ok(out)
}

#[derive(Default)]
struct PartialSample {
    line: usize,
    matrix: Option<Vec<Vec<f64>>>,
    nu: Option<Vec<f64>>,
    n0: Option<f64>,
}

impl PartialSample {
    fn finish(self) -> Result<SampleSpec, ConfigError> {
        let missing = |k: &str| ConfigError::at(self.line, format!("[sample] is missing '{k}'"));
        Ok(SampleSpec {
            line: self.line,
            matrix: self.matrix.clone().ok_or_else(|| missing("A"))?,
            nu: self.nu.clone().ok_or_else(|| missing("nu"))?,
            n0: self.n0.ok_or_else(|| missing("n"))?,
        })
    }
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<String> = Vec::new();
    let mut sample: Option<PartialSample> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with('[') {
            if body != "[sample]" {
                return Err(ConfigError::at(line, format!("unknown section '{body}'")));
            }
            if let Some(s) = sample.take() {
                cfg.samples.push(s.finish()?);
            }
            sample = Some(PartialSample { line, ..Default::default() });
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::at(line, format!("expected 'key = value', got '{body}'")));
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(ConfigError::at(line, format!("{key}: missing value")));
        }

        if let Some(s) = sample.as_mut() {
            let dup = match key {
                "A" => s
                    .matrix
                    .replace(value.split(';').map(|row| vector(line, key, row)).collect::<Result<_, _>>()?)
                    .is_some(),
                "nu" => s.nu.replace(vector(line, key, value)?).is_some(),
                "n" => s.n0.replace(number(line, key, value)?).is_some(),
                _ => return Err(ConfigError::at(line, format!("unknown sample key '{key}'"))),
            };
            if dup {
                return Err(ConfigError::at(line, format!("duplicate sample key '{key}'")));
            }
            continue;
        }

        if seen.iter().any(|k| k == key) {
            return Err(ConfigError::at(line, format!("duplicate key '{key}'")));
        }
        seen.push(key.to_string());
        match key {
            "a" => cfg.a = Some(number(line, key, value)?),
            "n" => cfg.n = Some(number(line, key, value)?),
            "d" => cfg.d = integer(line, key, value)?,
            "radius" => cfg.radius = number(line, key, value)?,
            "obstacle" => cfg.obstacle = number(line, key, value)?,
            "lambda_max" => cfg.lambda_max = number(line, key, value)?,
            "grid_points" => cfg.grid_points = integer(line, key, value)?,
            "mode_cap" => cfg.mode_cap = Some(integer(line, key, value)?),
            "zero_tol" => cfg.zero_tol = number(line, key, value)?,
            "pole_tol" => cfg.pole_tol = number(line, key, value)?,
            "root_tol" => cfg.root_tol = number(line, key, value)?,
            "samples_per_pi" => cfg.samples_per_pi = integer(line, key, value)?,
            "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
            _ => return Err(ConfigError::at(line, format!("unknown key '{key}'"))),
        }
    }
    if let Some(s) = sample.take() {
        cfg.samples.push(s.finish()?);
    }
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::global(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

impl RunConfig {
    /// Checks needed before a full run. The `a != 1` and `a n != 1`
    /// conditions are gates, not config errors.
    pub fn validate_run(&self) -> Result<(f64, f64), ConfigError> {
        let (Some(a), Some(n)) = (self.a, self.n) else {
            return Err(ConfigError::global("a full run needs both 'a' and 'n'"));
        };
        if a <= 0.0 || n <= 0.0 {
            return Err(ConfigError::global(format!("a = {a} and n = {n} must be positive")));
        }
        if self.d != 2 {
            return Err(ConfigError::global(format!("radial runs support d = 2 only, got d = {}", self.d)));
        }
        if self.radius <= 0.0 || self.obstacle < 0.0 || self.obstacle >= self.radius {
            return Err(ConfigError::global(format!(
                "need radius > 0 and 0 <= obstacle < radius, got radius = {}, obstacle = {}",
                self.radius, self.obstacle
            )));
        }
        if self.lambda_max <= 0.0 {
            return Err(ConfigError::global(format!("lambda_max = {} must be positive", self.lambda_max)));
        }
        let xmax = self.radius * (self.lambda_max * (n / a).max(1.0)).sqrt();
        if xmax > 0.5 * MAX_ARG {
            return Err(ConfigError::global(format!("lambda_max = {} puts Bessel arguments past {}", self.lambda_max, 0.5 * MAX_ARG)));
        }
        if self.grid_points < 100 {
            return Err(ConfigError::global(format!("grid_points = {} must be at least 100", self.grid_points)));
        }
        for (k, v) in [("zero_tol", self.zero_tol), ("pole_tol", self.pole_tol), ("root_tol", self.root_tol)] {
            if v <= 0.0 {
                return Err(ConfigError::global(format!("{k} = {v} must be positive")));
            }
        }
        if self.samples_per_pi == 0 {
            return Err(ConfigError::global("samples_per_pi must be positive"));
        }
        Ok((a, n))
    }

    /// `key = value` lines echoing the run parameters.
    pub fn echo(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or("unset".to_string(), |x| x.to_string());
        let mut out = vec![
            format!("a = {}", opt(self.a)),
            format!("n = {}", opt(self.n)),
            format!("d = {}", self.d),
            format!("radius = {}", self.radius),
            format!("obstacle = {}", self.obstacle),
            format!("lambda_max = {}", self.lambda_max),
            format!("grid_points = {}", self.grid_points),
            format!("mode_cap = {}", self.mode_cap.map_or("auto".to_string(), |m| m.to_string())),
            format!("zero_tol = {:e}", self.zero_tol),
            format!("pole_tol = {:e}", self.pole_tol),
            format!("root_tol = {:e}", self.root_tol),
            format!("samples_per_pi = {}", self.samples_per_pi),
        ];
        out.push(format!("samples = {}", self.samples.len()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_samples() {
        let cfg = parse(
            "# disk\na = 0.5\nn=0.25 # inline\nlambda_max = 50\n\n[sample]\nA = 2 0 0; 0 3 0; 0 0 4\nnu = 0 0 1\nn = 1.5\n[sample]\nA = 0.5 0; 0 0.5\nnu = 1 0\nn = 2\n",
        )
        .unwrap();
        assert_eq!(cfg.a, Some(0.5));
        assert_eq!(cfg.n, Some(0.25));
        assert_eq!(cfg.lambda_max, 50.0);
        assert_eq!(cfg.samples.len(), 2);
        assert_eq!(cfg.samples[0].line, 6);
        assert_eq!(cfg.samples[0].matrix[2], vec![0.0, 0.0, 4.0]);
        assert_eq!(cfg.samples[1].n0, 2.0);
        assert!(cfg.samples[0].to_sample().is_ok());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse("a = 0.5\nn = x\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert_eq!(parse("a = 1\nfoo = 2\n").unwrap_err().line, Some(2));
        assert_eq!(parse("a = 1\na = 2\n").unwrap_err().line, Some(2));
        assert_eq!(parse("just text\n").unwrap_err().line, Some(1));
        assert_eq!(parse("[samples]\n").unwrap_err().line, Some(1));
        assert_eq!(parse("[sample]\nA = 1 0; 0 1\nn = 1\n").unwrap_err().line, Some(1));
        let bad = parse("[sample]\nA = 1 2; 0 1\nnu = 1 0\nn = 1\n").unwrap();
        assert_eq!(bad.samples[0].to_sample().unwrap_err().line, Some(1));
    }

    #[test]
    fn run_validation() {
        assert!(parse("n = 1\n").unwrap().validate_run().is_err());
        assert!(parse("a = 0.5\nn = 0.25\ngrid_points = 10\n").unwrap().validate_run().is_err());
        assert!(parse("a = 0.5\nn = 0.25\nd = 3\n").unwrap().validate_run().is_err());
        assert!(parse("a = 0.5\nn = 0.25\nobstacle = 1\n").unwrap().validate_run().is_err());
        // degenerate media are gate failures, not config errors
        assert!(parse("a = 1\nn = 0.25\n").unwrap().validate_run().is_ok());
        assert!(parse("a = 2\nn = 0.5\n").unwrap().validate_run().is_ok());
    }
}
