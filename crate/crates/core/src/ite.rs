//! Interior transmission eigenvalues from the per-mode matching determinant,
//! cross-checked against the zero events of the spectral flow.

use rayon::prelude::*;
use thiserror::Error;

use crate::dtn::{self, DtnError};
use crate::flow::{self, FlowLedger};
use crate::media::{Media, MediaError, RadialDomain};
use crate::specfun::{bisect, BesselOrder};

/// Relative distance within which a determinant root and a flow zero agree.
pub const MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IteError {
    #[error(transparent)]
    Dtn(#[from] DtnError),
    #[error(transparent)]
    Media(#[from] MediaError),
    #[error("mode {mode}: root at lambda = {lambda} found only by the {found_by} method")]
    Mismatch { mode: u32, lambda: f64, found_by: RootSource },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootSource {
    Determinant,
    FlowCrossing,
    Both,
}

impl RootSource {
    pub fn tag(self) -> &'static str {
        match self {
            RootSource::Determinant => "determinant",
            RootSource::FlowCrossing => "flow",
            RootSource::Both => "both",
        }
    }
}

impl std::fmt::Display for RootSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionRoot {
    pub lambda: f64,
    pub mode: BesselOrder,
    pub multiplicity: usize,
    pub source: RootSource,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IteOptions {
    /// Scan samples per zero spacing of the faster Bessel factor.
    pub samples_per_pi: usize,
    /// Relative threshold for an even-order root of the determinant.
    pub zero_tol: f64,
    /// Relative bracket width at which root bisection stops.
    pub root_tol: f64,
}

impl Default for IteOptions {
    fn default() -> Self {
        Self { samples_per_pi: 16, zero_tol: 1e-9, root_tol: 1e-13 }
    }
}

/// Scaled matching determinant of mode `m`.
///
/// Equal to `R D_m(λ)` divided by a positive amplitude per Bessel factor:
/// the large-argument envelope `sqrt(2/(πx))` past the turning point, the
/// factor itself before it. The sign is that of `D_m`.
pub fn transmission_det(m: u32, lambda: f64, media: &Media, domain: &RadialDomain) -> f64 {
    let (d, _) = det_with_scale(m, lambda, media, domain);
    d
}

fn det_with_scale(m: u32, lambda: f64, media: &Media, domain: &RadialDomain) -> (f64, f64) {
    let p = dtn::laplace_pair(m, lambda, domain);
    let q = dtn::medium_pair(m, lambda, media, domain);
    let t1 = media.a() * p.u * q.w;
    let t2 = p.w * q.u;
    (t1 - t2, 1.0 + t1.abs() + t2.abs())
}

/// Determinant roots of mode `m` on `(0, λ_max]`, with even-order roots.
pub fn determinant_roots(
    m: u32,
    media: &Media,
    domain: &RadialDomain,
    lambda_max: f64,
    opts: &IteOptions,
) -> Vec<f64> {
    let det = |l: f64| transmission_det(m, l, media, domain);
    let step = flow::sample_step(media, domain, opts.samples_per_pi);
    let start = if det(0.0) == 0.0 { (step / 64.0).powi(2) } else { 0.0 };
    let grid = flow::sqrt_grid(start, lambda_max, step);
    let vals: Vec<f64> = grid.iter().map(|&l| det(l)).collect();
    let root = |lo: f64, hi: f64| bisect(det, lo, hi, flow::root_width(opts.root_tol, hi));

    let mut roots = Vec::new();
    for i in 0..grid.len() - 1 {
        let (a, b) = (vals[i], vals[i + 1]);
        if a == 0.0 {
            if i > 0 || start == 0.0 {
                roots.push(grid[i]);
            }
        } else if b != 0.0 && (a > 0.0) != (b > 0.0) {
            roots.push(root(grid[i], grid[i + 1]));
        }
    }
    if vals[grid.len() - 1] == 0.0 {
        roots.push(lambda_max);
    }
    for i in 1..grid.len().saturating_sub(1) {
        let (a, c, b) = (vals[i - 1], vals[i], vals[i + 1]);
        let same = a * c > 0.0 && c * b > 0.0;
        if !(same && c.abs() < a.abs() && c.abs() <= b.abs()) {
            continue;
        }
        let sgn = c.signum();
        let (at, low) = flow::golden_min(|l| sgn * det(l), grid[i - 1], grid[i + 1]);
        if low < 0.0 {
            roots.push(root(grid[i - 1], at));
            roots.push(root(at, grid[i + 1]));
        } else if low <= opts.zero_tol * det_with_scale(m, at, media, domain).1 {
            roots.push(at);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn agree(x: f64, y: f64) -> bool {
    (x - y).abs() <= MATCH_TOL * x.abs().max(1.0)
}

/// Pair the determinant roots of one mode with the flow's zero events.
fn reconcile(m: u32, det_roots: &[f64], ledger: &FlowLedger) -> Result<Vec<TransmissionRoot>, IteError> {
    let flow_roots: Vec<f64> = ledger.crossings(m).map(|e| e.lambda).collect();
    let mode = BesselOrder(m);
    let mut out = Vec::with_capacity(det_roots.len());
    let (mut i, mut j) = (0, 0);
    while i < det_roots.len() || j < flow_roots.len() {
        match (det_roots.get(i), flow_roots.get(j)) {
            (Some(&d), Some(&f)) if agree(d, f) => {
                out.push(TransmissionRoot { lambda: d, mode, multiplicity: mode.multiplicity(), source: RootSource::Both });
                i += 1;
                j += 1;
            }
            (Some(&d), Some(&f)) if d < f => {
                return Err(IteError::Mismatch { mode: m, lambda: d, found_by: RootSource::Determinant })
            }
            (Some(_), Some(&f)) | (None, Some(&f)) => {
                return Err(IteError::Mismatch { mode: m, lambda: f, found_by: RootSource::FlowCrossing })
            }
            (Some(&d), None) => {
                return Err(IteError::Mismatch { mode: m, lambda: d, found_by: RootSource::Determinant })
            }
            (None, None) => unreachable!(),
        }
    }
    Ok(out)
}

/// Transmission eigenvalues on `[0, λ_max]` with multiplicities, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct IteSpectrum {
    pub lambda_max: f64,
    pub roots: Vec<TransmissionRoot>,
}

impl IteSpectrum {
    /// `N_T(λ)`: non-negative ITEs `<= λ`, including `λ = 0` when present.
    pub fn counting(&self, lambda: f64) -> usize {
        self.roots.iter().filter(|r| r.lambda <= lambda).map(|r| r.multiplicity).sum()
    }

    /// ITEs in `(0, λ]`.
    pub fn counting_positive(&self, lambda: f64) -> usize {
        self.roots.iter().filter(|r| r.lambda > 0.0 && r.lambda <= lambda).map(|r| r.multiplicity).sum()
    }

    pub fn has_zero_root(&self) -> bool {
        self.roots.first().is_some_and(|r| r.lambda == 0.0)
    }

    /// Smallest strictly positive ITE.
    pub fn first_positive(&self) -> Option<f64> {
        self.roots.iter().find(|r| r.lambda > 0.0).map(|r| r.lambda)
    }

    /// Positive ITEs repeated by multiplicity.
    pub fn expanded_positive(&self) -> Vec<f64> {
        self.roots
            .iter()
            .filter(|r| r.lambda > 0.0)
            .flat_map(|r| std::iter::repeat_n(r.lambda, r.multiplicity))
            .collect()
    }
}

/// Determinant roots for modes up to the ledger's cap, each matched to a
/// zero event of the flow. Any unmatched root is an error.
pub fn ite_spectrum(
    media: &Media,
    domain: &RadialDomain,
    ledger: &FlowLedger,
    opts: &IteOptions,
) -> Result<IteSpectrum, IteError> {
    media.check_guards()?;
    let lambda_max = ledger.lambda_max;
    let per_mode: Vec<Vec<TransmissionRoot>> = (0..=ledger.mode_cap)
        .into_par_iter()
        .map(|m| reconcile(m, &determinant_roots(m, media, domain, lambda_max, opts), ledger))
        .collect::<Result<_, _>>()?;
    let mut roots: Vec<TransmissionRoot> = per_mode.into_iter().flatten().collect();
    if !domain.has_obstacle() && transmission_det(0, 0.0, media, domain) == 0.0 {
        let source = if ledger.events.iter().any(|e| e.lambda == 0.0 && e.kind.is_zero()) {
            RootSource::Both
        } else {
            RootSource::Determinant
        };
        roots.push(TransmissionRoot { lambda: 0.0, mode: BesselOrder(0), multiplicity: 1, source });
    }
    roots.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.mode.cmp(&b.mode)));
    Ok(IteSpectrum { lambda_max, roots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{sweep, SweepOptions};
    use approx::assert_abs_diff_eq;

    fn disk() -> RadialDomain {
        RadialDomain::disk(1.0).unwrap()
    }

    #[test]
    fn determinant_at_origin() {
        let m = Media::new(0.5, 0.25, 2).unwrap();
        assert_eq!(transmission_det(0, 0.0, &m, &disk()), 0.0);
        assert!(transmission_det(1, 1e-6, &m, &disk()).abs() > 0.1);
        let ann = RadialDomain::new(1.0, 0.3).unwrap();
        assert!(transmission_det(0, 0.0, &Media::new(2.0, 3.0, 2).unwrap(), &ann).abs() > 0.1);
    }

    #[test]
    fn determinant_is_finite_across_poles() {
        let m = Media::new(0.5, 0.25, 2).unwrap();
        let j01sq = 2.404825557695773f64.powi(2);
        for l in [j01sq - 1e-9, j01sq, j01sq + 1e-9] {
            assert!(transmission_det(0, l, &m, &disk()).is_finite());
        }
        let d = (transmission_det(0, j01sq, &m, &disk()) - transmission_det(0, j01sq + 1e-9, &m, &disk())).abs();
        assert!(d < 1e-6);
    }

    #[test]
    fn first_roots_match_the_flow() {
        let m = Media::new(0.5, 0.25, 2).unwrap();
        let ledger = sweep(&m, &disk(), 1, 40.0, &SweepOptions::default()).unwrap();
        let spec = ite_spectrum(&m, &disk(), &ledger, &IteOptions::default()).unwrap();
        assert!(spec.has_zero_root());
        assert_eq!(spec.counting(0.0), 1);
        assert_eq!(spec.counting_positive(0.0), 0);
        assert_abs_diff_eq!(spec.first_positive().unwrap(), 2.348310561837661, epsilon = 1e-8);
        assert!(spec.roots.iter().all(|r| r.source == RootSource::Both));
        let expanded = spec.expanded_positive();
        assert_eq!(expanded.len(), spec.counting_positive(40.0));
        assert_abs_diff_eq!(expanded[1], expanded[0]);
    }

    #[test]
    fn missing_flow_zero_is_a_mismatch() {
        let m = Media::new(0.5, 0.25, 2).unwrap();
        let mut ledger = sweep(&m, &disk(), 1, 20.0, &SweepOptions::default()).unwrap();
        ledger.events.retain(|e| !(e.mode.0 == 1 && e.kind.is_zero()));
        let err = ite_spectrum(&m, &disk(), &ledger, &IteOptions::default()).unwrap_err();
        assert!(matches!(err, IteError::Mismatch { mode: 1, found_by: RootSource::Determinant, .. }));
    }
}
