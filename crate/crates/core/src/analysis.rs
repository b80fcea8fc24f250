//! End-to-end pipeline: gates, Dirichlet spectra, spectral flow, determinant
//! cross-check, bound reports.

use thiserror::Error;

use crate::bounds::{self, BoundReport, BoundsError, Evidence, Verdict};
use crate::dtn::{self, DtnError, SpectrumTable};
use crate::flow::{self, FlowError, FlowLedger, PoleJump, SweepOptions};
use crate::ite::{self, IteError, IteOptions, IteSpectrum};
use crate::media::{Media, RadialDomain};
use crate::symbols::{self, BoundarySample, DiscretenessRoute, EllipticityVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Ellipticity,
    Discreteness,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("radial pipeline supports d = 2 only, got d = {0}")]
    Dimension(u32),
    #[error("{gate:?} gate failed: {detail}")]
    Gate { gate: Gate, detail: String },
    #[error(transparent)]
    Dtn(#[from] DtnError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Ite(#[from] IteError),
    #[error("pole jump at lambda = {lambda}: measured {measured}, expected {expected}")]
    PoleJump { lambda: f64, measured: i64, expected: i64 },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

impl AnalysisError {
    /// Process exit status: 1 unsupported input, 2 gate, 3 internal consistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            AnalysisError::Dimension(_) => 1,
            AnalysisError::Gate { .. } => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub media: Media,
    pub domain: RadialDomain,
    pub lambda_max: f64,
    pub grid_points: usize,
    pub sweep: SweepOptions,
    pub ite: IteOptions,
    /// Times the sampling density may be doubled after a failed cross-check.
    pub refinements: u32,
}

impl AnalysisConfig {
    pub fn new(media: Media, domain: RadialDomain, lambda_max: f64) -> Self {
        Self {
            media,
            domain,
            lambda_max,
            grid_points: 500,
            sweep: SweepOptions::default(),
            ite: IteOptions::default(),
            refinements: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub verdict: EllipticityVerdict,
    pub sigma: i8,
    pub laplace: SpectrumTable,
    pub medium: SpectrumTable,
    pub ledger: FlowLedger,
    pub ites: IteSpectrum,
    pub pole_jumps: Vec<PoleJump>,
    pub reports: Vec<BoundReport>,
    /// Density doublings that were needed.
    pub refinements_used: u32,
}

impl Analysis {
    pub fn all_hold(&self) -> bool {
        self.reports.iter().all(|r| r.verdict != Verdict::Violated)
    }
}

/// Ellipticity and discreteness gates; returns the verdict with `σ`.
pub fn run_gates(media: &Media, domain: &RadialDomain) -> Result<(EllipticityVerdict, i8), AnalysisError> {
    let d = media.d() as usize;
    let sample = BoundarySample::isotropic(media.a(), media.n(), d).map_err(|e| AnalysisError::Gate {
        gate: Gate::Ellipticity,
        detail: e.to_string(),
    })?;
    let verdict = symbols::check_ellipticity(&sample);
    let Some(sigma) = verdict.sigma else {
        return Err(AnalysisError::Gate {
            gate: Gate::Ellipticity,
            detail: format!("symbols coincide: det A - 1 = {:e}", verdict.gap_det),
        });
    };
    if !(verdict.discrete_ok && symbols::check_discreteness_global(media, domain, DiscretenessRoute::Boundary)) {
        return Err(AnalysisError::Gate {
            gate: Gate::Discreteness,
            detail: format!("a n = {} is 1", media.a() * media.n()),
        });
    }
    Ok((verdict, sigma))
}

fn refinable(e: &AnalysisError) -> bool {
    matches!(
        e,
        AnalysisError::Flow(FlowError::UnresolvedEvent { .. } | FlowError::LedgerViolation { .. })
            | AnalysisError::Ite(IteError::Mismatch { .. })
    )
}

fn flow_and_roots(cfg: &AnalysisConfig, sigma: i8) -> Result<(FlowLedger, IteSpectrum), AnalysisError> {
    let ledger = flow::sweep(&cfg.media, &cfg.domain, sigma, cfg.lambda_max, &cfg.sweep)?;
    let ites = ite::ite_spectrum(&cfg.media, &cfg.domain, &ledger, &cfg.ite)?;
    Ok((ledger, ites))
}

pub fn analyze(cfg: &AnalysisConfig) -> Result<Analysis, AnalysisError> {
    if cfg.media.d() != 2 {
        return Err(AnalysisError::Dimension(cfg.media.d()));
    }
    let (verdict, sigma) = run_gates(&cfg.media, &cfg.domain)?;
    let laplace = dtn::dirichlet_spectrum(&cfg.domain, cfg.lambda_max)?;
    let medium = dtn::dirichlet_a_spectrum(&cfg.media, &cfg.domain, cfg.lambda_max)?;

    let mut run = *cfg;
    let mut used = 0;
    let (ledger, ites) = loop {
        match flow_and_roots(&run, sigma) {
            Ok(v) => break v,
            Err(e) if refinable(&e) && used < cfg.refinements => {
                run.sweep.samples_per_pi *= 2;
                run.ite.samples_per_pi *= 2;
                used += 1;
            }
            Err(e) => return Err(e),
        }
    };

    let pole_jumps = flow::pole_jumps(&ledger, &laplace, &medium);
    if let Some(bad) = pole_jumps.iter().find(|j| !j.holds(sigma)) {
        return Err(AnalysisError::PoleJump { lambda: bad.lambda, measured: bad.measured, expected: bad.expected(sigma) });
    }

    let ev = Evidence {
        media: &cfg.media,
        domain: &cfg.domain,
        sigma,
        ledger: &ledger,
        laplace: &laplace,
        medium: &medium,
        ites: &ites,
    };
    let reports = bounds::check_all(&ev, cfg.grid_points);
    bounds::check_consistency(&reports)?;

    Ok(Analysis { verdict, sigma, laplace, medium, ledger, ites, pole_jumps, reports, refinements_used: used })
}
