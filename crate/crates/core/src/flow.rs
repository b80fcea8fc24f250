//! Spectral flow of `σ(F(λ) - F_A(λ))` along `λ ∈ [0, λ_max]`.
//!
//! On a radial domain the operator is diagonal over angular modes, so its
//! eigenvalues are the scalar branches `μ_m(λ) = σ (f_m(λ) - fA_m(λ))`, each
//! carried with multiplicity 1 (`m = 0`) or 2 (`m >= 1`). The number of
//! negative eigenvalues `n⁻(λ)` only changes when a branch passes through a
//! pole (`n₁`) or through zero (`n₂`):
//!
//! ```text
//! n⁻(λ) = n⁻(0) + n₁(λ) + n₂(λ)
//! ```
//!
//! [`sweep`] locates every such event per mode and verifies this identity
//! against a direct count on an off-event grid.

use rayon::prelude::*;
use thiserror::Error;

use crate::dtn::{self, DtnError, ExtReal, RadialPair, SpectrumTable};
use crate::media::{Media, MediaError, RadialDomain};
use crate::specfun::{self, bisect, BesselOrder, SpecFunError};

/// Number of extra modes past the cap whose branches must stay positive.
pub const GUARD_MODES: u32 = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error(transparent)]
    Dtn(#[from] DtnError),
    #[error(transparent)]
    Media(#[from] MediaError),
    #[error("sigma must be +1 or -1, got {0}")]
    Sigma(i8),
    #[error("symbol gap sigma*(1 - a) = {0} is not positive: branches are not bounded below")]
    SymbolGap(f64),
    #[error("lambda = {lambda} sits on a pole of mode {mode}")]
    PoleHit { lambda: f64, mode: u32 },
    #[error("tail certification failed: mu_{mode}({lambda}) = {mu} is not positive")]
    TailCertification { mode: u32, lambda: f64, mu: f64 },
    #[error("no certified mode cap below order {0}")]
    ModeCap(u32),
    #[error("events of mode {mode} near lambda = {lambda} could not be separated")]
    UnresolvedEvent { mode: u32, lambda: f64 },
    #[error("even-order zero of mu_{mode} at lambda = {lambda} (strict mode)")]
    Touch { mode: u32, lambda: f64 },
    #[error("ledger identity violated at lambda = {lambda}: direct n- = {direct}, ledger = {predicted}")]
    LedgerViolation { lambda: f64, direct: i64, predicted: i64 },
}

impl From<SpecFunError> for FlowError {
    fn from(e: SpecFunError) -> Self {
        FlowError::Dtn(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Relative threshold below which `|μ|` counts as zero.
    pub zero_tol: f64,
    /// Relative threshold marking a pole of a DtN value.
    pub pole_tol: f64,
    /// Relative bracket width at which root bisection stops.
    pub root_tol: f64,
    /// Samples per zero spacing of the faster-oscillating Bessel factor.
    pub samples_per_pi: usize,
    /// Highest mode to sweep; `None` certifies one from the branch tail.
    pub mode_cap: Option<u32>,
    /// Treat even-order zeros as errors.
    pub strict: bool,
    /// Off-event points used to verify the ledger identity.
    pub verification_points: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            zero_tol: 1e-9,
            pole_tol: dtn::POLE_TOL,
            root_tol: 1e-13,
            samples_per_pi: 32,
            mode_cap: None,
            strict: false,
            verification_points: 200,
        }
    }
}

/// How a branch event changes `n⁻`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// `μ` passes from positive to negative: `n⁻` goes up.
    ZeroCrossUp,
    /// `μ` passes from negative to positive: `n⁻` goes down.
    ZeroCrossDown,
    /// `μ` touches zero without changing sign (also the `λ = 0` root when
    /// the branch leaves it upward).
    ZeroTouch,
    PoleOfF,
    PoleOfFA,
    /// Poles of both maps in the same mode: a singular spectral point candidate.
    DoublePole,
}

impl EventKind {
    pub fn tag(self) -> &'static str {
        match self {
            EventKind::ZeroCrossUp => "zero_up",
            EventKind::ZeroCrossDown => "zero_down",
            EventKind::ZeroTouch => "zero_touch",
            EventKind::PoleOfF => "pole_F",
            EventKind::PoleOfFA => "pole_FA",
            EventKind::DoublePole => "pole_double",
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, EventKind::ZeroCrossUp | EventKind::ZeroCrossDown | EventKind::ZeroTouch)
    }

    pub fn is_pole(self) -> bool {
        !self.is_zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEvent {
    pub lambda: f64,
    pub mode: BesselOrder,
    pub kind: EventKind,
    pub delta_n1: i64,
    pub delta_n2: i64,
    pub mu_left: f64,
    pub mu_right: f64,
}

/// Result of a sweep: `n⁻(0)` and every event on `[0, λ_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowLedger {
    pub sigma: i8,
    pub lambda_max: f64,
    pub mode_cap: u32,
    pub n_minus_0: usize,
    pub events: Vec<BranchEvent>,
}

impl FlowLedger {
    fn sum_below(&self, lambda: f64, pick: impl Fn(&BranchEvent) -> i64) -> i64 {
        self.events.iter().take_while(|e| e.lambda < lambda).map(pick).sum()
    }

    /// Change of `n⁻` through poles on `(0, λ)`.
    pub fn n1(&self, lambda: f64) -> i64 {
        self.sum_below(lambda, |e| e.delta_n1)
    }

    /// Change of `n⁻` through zero on `[0, λ)`.
    pub fn n2(&self, lambda: f64) -> i64 {
        self.sum_below(lambda, |e| e.delta_n2)
    }

    /// `n⁻(0) + n₁(λ) + n₂(λ)`.
    pub fn n_minus(&self, lambda: f64) -> i64 {
        self.n_minus_0 as i64 + self.n1(lambda) + self.n2(lambda)
    }

    /// Branch counts `(Z⁺, Z⁻, Z⁰)` of zero events below `λ`, with multiplicity.
    pub fn zero_counts(&self, lambda: f64) -> (i64, i64, i64) {
        let mut z = (0, 0, 0);
        for e in self.events.iter().take_while(|e| e.lambda < lambda) {
            let w = e.mode.multiplicity() as i64;
            match e.kind {
                EventKind::ZeroCrossUp => z.0 += w,
                EventKind::ZeroCrossDown => z.1 += w,
                EventKind::ZeroTouch => z.2 += w,
                _ => {}
            }
        }
        z
    }

    /// Zero events of mode `m` at `λ > 0`.
    pub fn crossings(&self, m: u32) -> impl Iterator<Item = &BranchEvent> {
        self.events.iter().filter(move |e| e.mode.0 == m && e.kind.is_zero() && e.lambda > 0.0)
    }

    pub fn near_event(&self, lambda: f64, tol: f64) -> bool {
        let t = tol * lambda.max(1.0);
        self.events.iter().any(|e| (e.lambda - lambda).abs() <= t)
    }

    /// `count` points spread over `(0, λ_max]`, each nudged off every event.
    pub fn off_event_grid(&self, count: usize) -> Vec<f64> {
        (1..=count)
            .map(|i| {
                let mut lam = self.lambda_max * (i as f64 - 0.5) / count as f64;
                while self.near_event(lam, 1e-6) {
                    lam += 3e-6 * lam.max(1.0);
                }
                lam
            })
            .collect()
    }
}

fn check_sigma(sigma: i8) -> Result<f64, FlowError> {
    match sigma {
        1 | -1 => Ok(f64::from(sigma)),
        s => Err(FlowError::Sigma(s)),
    }
}

/// One evaluation of a branch.
#[derive(Debug, Clone, Copy)]
struct MuSample {
    mu: f64,
    /// Magnitude of the two terms, for relative zero tests.
    scale: f64,
    f_pole: bool,
    fa_pole: bool,
}

struct Branch<'a> {
    m: u32,
    media: &'a Media,
    domain: &'a RadialDomain,
    sigma: f64,
    pole_tol: f64,
}

impl Branch<'_> {
    fn pairs(&self, lambda: f64) -> (RadialPair, RadialPair) {
        (
            dtn::laplace_pair(self.m, lambda, self.domain),
            dtn::medium_pair(self.m, lambda, self.media, self.domain),
        )
    }

    fn sample(&self, lambda: f64) -> MuSample {
        let (lp, mp) = self.pairs(lambda);
        let f = lp.log_derivative() / self.domain.radius();
        let fa = self.media.a() * mp.log_derivative() / self.domain.radius();
        MuSample {
            mu: self.sigma * (f - fa),
            scale: 1.0 + f.abs() + fa.abs(),
            f_pole: lp.is_pole(self.pole_tol),
            fa_pole: mp.is_pole(self.pole_tol),
        }
    }

    fn mu(&self, lambda: f64) -> f64 {
        self.sample(lambda).mu
    }
}

/// Branch `μ_m(λ) = σ (f_m(λ) - fA_m(λ))`, or the pole marker.
pub fn mu_mode(m: u32, lambda: f64, media: &Media, domain: &RadialDomain, sigma: i8) -> Result<ExtReal, FlowError> {
    let sigma = check_sigma(sigma)?;
    BesselOrder::new(m)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(SpecFunError::Domain { func: "mu_mode", x: lambda }.into());
    }
    let s = Branch { m, media, domain, sigma, pole_tol: dtn::POLE_TOL }.sample(lambda);
    Ok(if s.f_pole || s.fa_pole { ExtReal::Pole } else { ExtReal::Finite(s.mu) })
}

fn symbol_gap(media: &Media, sigma: f64) -> Result<(), FlowError> {
    let gap = sigma * (1.0 - media.a());
    if gap > 0.0 {
        Ok(())
    } else {
        Err(FlowError::SymbolGap(gap))
    }
}

/// Number of negative branches at `λ` over modes `0..=mode_cap`, with the
/// guard modes above the cap certified positive.
pub fn n_minus_at(lambda: f64, media: &Media, domain: &RadialDomain, sigma: i8, mode_cap: u32) -> Result<usize, FlowError> {
    let sg = check_sigma(sigma)?;
    symbol_gap(media, sg)?;
    let mut count = 0;
    for m in 0..=mode_cap + GUARD_MODES {
        let s = Branch { m, media, domain, sigma: sg, pole_tol: dtn::POLE_TOL }.sample(lambda);
        if s.f_pole || s.fa_pole {
            return Err(FlowError::PoleHit { lambda, mode: m });
        }
        if m > mode_cap {
            if s.mu.is_nan() || s.mu <= 0.0 {
                return Err(FlowError::TailCertification { mode: m, lambda, mu: s.mu });
            }
        } else if s.mu < 0.0 {
            count += BesselOrder(m).multiplicity();
        }
    }
    Ok(count)
}

/// Smallest cap such that every mode above it is pole-free on `[0, λ_max]`
/// and positive at `λ_max` over the next [`GUARD_MODES`] modes, plus the
/// guard modes themselves.
pub fn certified_mode_cap(
    media: &Media,
    domain: &RadialDomain,
    sigma: i8,
    lambda_max: f64,
    zero_tol: f64,
) -> Result<u32, FlowError> {
    let sg = check_sigma(sigma)?;
    symbol_gap(media, sg)?;
    let xmax = domain.radius() * (lambda_max * media.index_ratio().max(1.0)).sqrt();
    let limit = specfun::MAX_ORDER - 2 * GUARD_MODES;
    let mut m = 0;
    while m <= limit {
        // annulus zeros exceed the disk ones, so this bound covers both maps
        if specfun::bessel_zeros(m, 1)?[0] > xmax {
            let tail_ok = (m..=m + GUARD_MODES).all(|k| {
                let s = Branch { m: k, media, domain, sigma: sg, pole_tol: dtn::POLE_TOL }.sample(lambda_max);
                s.mu > 10.0 * zero_tol * s.scale
            });
            if tail_ok {
                return Ok(m + GUARD_MODES);
            }
        }
        m += 1;
    }
    Err(FlowError::ModeCap(limit))
}

fn pole_offset(lambda: f64) -> f64 {
    1e-9 * lambda.max(1.0)
}

pub(crate) fn golden_min(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if b - a <= 1e-14 * b.abs().max(1.0) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
        if gc < 0.0 || gd < 0.0 {
            break;
        }
    }
    if gc < gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

pub(crate) fn root_width(tol: f64, lambda: f64) -> f64 {
    tol * lambda.max(1.0)
}

/// Samples uniform in `sqrt(λ)` between `left` and `right` inclusive.
pub(crate) fn sqrt_grid(left: f64, right: f64, step: f64) -> Vec<f64> {
    let (sl, sr) = (left.sqrt(), right.sqrt());
    let n = ((sr - sl) / step).ceil().max(1.0) as usize;
    let mut pts: Vec<f64> = (0..=n).map(|i| (sl + (sr - sl) * i as f64 / n as f64).powi(2)).collect();
    pts[0] = left;
    pts[n] = right;
    pts
}

pub(crate) fn sample_step(media: &Media, domain: &RadialDomain, samples_per_pi: usize) -> f64 {
    std::f64::consts::PI / (samples_per_pi.max(1) as f64 * domain.radius() * media.index_ratio().max(1.0).sqrt())
}

/// Pole positions of mode `m` on `(0, λ_max]`, tagged by family.
fn mode_poles(m: u32, media: &Media, domain: &RadialDomain, lambda_max: f64) -> Result<Vec<(f64, EventKind)>, FlowError> {
    let r = domain.radius();
    let lap: Vec<f64> = specfun::bessel_zeros_below(m, lambda_max.sqrt() * r)?
        .into_iter()
        .map(|z| (z / r).powi(2))
        .collect();
    let xa = (lambda_max * media.index_ratio()).sqrt() * r;
    let zeros_a = if domain.has_obstacle() {
        specfun::cross_product_zeros_below(m, domain.ratio(), xa)?
    } else {
        specfun::bessel_zeros_below(m, xa)?
    };
    let med: Vec<f64> = zeros_a.into_iter().map(|z| (z / r).powi(2) / media.index_ratio()).collect();

    let mut poles: Vec<(f64, EventKind)> = lap.iter().map(|&l| (l, EventKind::PoleOfF)).collect();
    for l in med {
        match poles.iter_mut().find(|(p, _)| (p - l).abs() <= 1e-9 * l.max(1.0)) {
            Some(hit) => hit.1 = EventKind::DoublePole,
            None => poles.push((l, EventKind::PoleOfFA)),
        }
    }
    poles.retain(|(l, _)| *l <= lambda_max);
    poles.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(poles)
}

fn sweep_mode(
    m: u32,
    media: &Media,
    domain: &RadialDomain,
    sigma: f64,
    lambda_max: f64,
    opts: &SweepOptions,
) -> Result<Vec<BranchEvent>, FlowError> {
    let branch = Branch { m, media, domain, sigma, pole_tol: opts.pole_tol };
    let mode = BesselOrder(m);
    let weight = mode.multiplicity() as i64;
    let step = sample_step(media, domain, opts.samples_per_pi);
    let poles = mode_poles(m, media, domain, lambda_max)?;
    let mut events = Vec::new();

    let origin_root = branch.mu(0.0) == 0.0;
    let origin_probe = (step / 64.0).powi(2);
    if origin_root {
        let after = branch.mu(origin_probe);
        let up = after < 0.0;
        events.push(BranchEvent {
            lambda: 0.0,
            mode,
            kind: if up { EventKind::ZeroCrossUp } else { EventKind::ZeroTouch },
            delta_n1: 0,
            delta_n2: if up { weight } else { 0 },
            mu_left: 0.0,
            mu_right: after,
        });
    }

    for &(p, kind) in &poles {
        let d = pole_offset(p);
        let (l, r) = (branch.mu(p - d), branch.mu(p + d));
        let neg = |v: f64| i64::from(v < 0.0);
        events.push(BranchEvent {
            lambda: p,
            mode,
            kind,
            delta_n1: weight * (neg(r) - neg(l)),
            delta_n2: 0,
            mu_left: l,
            mu_right: r,
        });
    }

    let mut edges = vec![if origin_root { origin_probe } else { 0.0 }];
    for &(p, _) in &poles {
        edges.push(p - pole_offset(p));
        edges.push(p + pole_offset(p));
    }
    edges.push(lambda_max);
    for pair in edges.chunks(2) {
        let (left, right) = (pair[0], pair[1]);
        if right <= left {
            continue;
        }
        let grid = sqrt_grid(left, right, step);
        let vals: Vec<MuSample> = grid.iter().map(|&l| branch.sample(l)).collect();
        scan_interval(&branch, &grid, &vals, opts, &mut events)?;
    }
    events.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    for w in events.windows(2) {
        if w[0].kind.is_zero() && w[1].kind.is_zero() && w[1].lambda - w[0].lambda <= 1e-12 * w[1].lambda.max(1.0) {
            return Err(FlowError::UnresolvedEvent { mode: m, lambda: w[0].lambda });
        }
    }
    Ok(events)
}

fn crossing_event(branch: &Branch, lo: f64, hi: f64, left_positive: bool, tol: f64) -> BranchEvent {
    let root = bisect(|l| branch.mu(l), lo, hi, root_width(tol, hi));
    let h = (1e-8 * root.max(1.0)).min(0.25 * (hi - lo));
    let weight = BesselOrder(branch.m).multiplicity() as i64;
    let (kind, dn2) = if left_positive {
        (EventKind::ZeroCrossUp, weight)
    } else {
        (EventKind::ZeroCrossDown, -weight)
    };
    BranchEvent {
        lambda: root,
        mode: BesselOrder(branch.m),
        kind,
        delta_n1: 0,
        delta_n2: dn2,
        mu_left: branch.mu((root - h).max(lo)),
        mu_right: branch.mu((root + h).min(hi)),
    }
}

/// Sign changes between samples, plus local `|μ|` minima refined to catch
/// close root pairs and even-order zeros.
fn scan_interval(
    branch: &Branch,
    grid: &[f64],
    vals: &[MuSample],
    opts: &SweepOptions,
    events: &mut Vec<BranchEvent>,
) -> Result<(), FlowError> {
    for i in 0..grid.len() - 1 {
        let (a, b) = (vals[i].mu, vals[i + 1].mu);
        if a == 0.0 && i > 0 {
            // landed exactly on a root: treat the sample as its own bracket
            let before = vals[i - 1].mu;
            if (before > 0.0) != (b > 0.0) {
                events.push(crossing_event(branch, grid[i - 1], grid[i + 1], before > 0.0, opts.root_tol));
            }
            continue;
        }
        if a != 0.0 && b != 0.0 && (a > 0.0) != (b > 0.0) {
            events.push(crossing_event(branch, grid[i], grid[i + 1], a > 0.0, opts.root_tol));
        }
    }
    for i in 1..grid.len().saturating_sub(1) {
        let (a, c, b) = (vals[i - 1].mu, vals[i].mu, vals[i + 1].mu);
        let same = (a > 0.0) == (c > 0.0) && (c > 0.0) == (b > 0.0) && a != 0.0 && b != 0.0 && c != 0.0;
        if !(same && c.abs() < a.abs() && c.abs() <= b.abs()) {
            continue;
        }
        let sgn = c.signum();
        let (at, low) = golden_min(|l| sgn * branch.mu(l), grid[i - 1], grid[i + 1]);
        if low < 0.0 {
            events.push(crossing_event(branch, grid[i - 1], at, sgn > 0.0, opts.root_tol));
            events.push(crossing_event(branch, at, grid[i + 1], sgn < 0.0, opts.root_tol));
        } else if low <= opts.zero_tol * branch.sample(at).scale {
            if opts.strict {
                return Err(FlowError::Touch { mode: branch.m, lambda: at });
            }
            events.push(BranchEvent {
                lambda: at,
                mode: BesselOrder(branch.m),
                kind: EventKind::ZeroTouch,
                delta_n1: 0,
                delta_n2: 0,
                mu_left: a,
                mu_right: b,
            });
        }
    }
    Ok(())
}

/// Sweep every mode up to the (certified or given) cap over `[0, λ_max]`
/// and verify the ledger identity on an off-event grid.
pub fn sweep(
    media: &Media,
    domain: &RadialDomain,
    sigma: i8,
    lambda_max: f64,
    opts: &SweepOptions,
) -> Result<FlowLedger, FlowError> {
    media.check_guards()?;
    let sg = check_sigma(sigma)?;
    symbol_gap(media, sg)?;
    if !(lambda_max.is_finite() && lambda_max > 0.0) {
        return Err(DtnError::LambdaMax(lambda_max).into());
    }
    let mode_cap = match opts.mode_cap {
        Some(c) => c,
        None => certified_mode_cap(media, domain, sigma, lambda_max, opts.zero_tol)?,
    };
    let n_minus_0 = n_minus_at(0.0, media, domain, sigma, mode_cap)?;
    let per_mode: Vec<Vec<BranchEvent>> = (0..=mode_cap)
        .into_par_iter()
        .map(|m| sweep_mode(m, media, domain, sg, lambda_max, opts))
        .collect::<Result<_, _>>()?;
    let mut events: Vec<BranchEvent> = per_mode.into_iter().flatten().collect();
    events.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.mode.cmp(&b.mode)));
    let ledger = FlowLedger { sigma, lambda_max, mode_cap, n_minus_0, events };
    verify_identity(&ledger, media, domain, opts.verification_points)?;
    Ok(ledger)
}

/// Compare the ledger's `n⁻` with a direct count at off-event points.
pub fn verify_identity(ledger: &FlowLedger, media: &Media, domain: &RadialDomain, points: usize) -> Result<(), FlowError> {
    let grid = ledger.off_event_grid(points);
    let checks: Vec<Result<(), FlowError>> = grid
        .par_iter()
        .map(|&lam| {
            let direct = n_minus_at(lam, media, domain, ledger.sigma, ledger.mode_cap)? as i64;
            let predicted = ledger.n_minus(lam);
            if direct == predicted {
                Ok(())
            } else {
                Err(FlowError::LedgerViolation { lambda: lam, direct, predicted })
            }
        })
        .collect();
    checks.into_iter().collect()
}

/// Jump of `n₁` at one pole location, against the rank law `σ(m_A - m_0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleJump {
    pub lambda: f64,
    pub measured: i64,
    /// Rank of the residue of `F` (multiplicity in the Laplace table).
    pub m0: usize,
    /// Rank of the residue of `F_A` (multiplicity in the medium table).
    pub m_a: usize,
    /// Bound on the residue-range intersection; zero unless both maps have a pole here.
    pub intersection_bound: usize,
}

impl PoleJump {
    pub fn expected(&self, sigma: i8) -> i64 {
        i64::from(sigma) * (self.m_a as i64 - self.m0 as i64)
    }

    pub fn is_singular_candidate(&self) -> bool {
        self.intersection_bound > 0
    }

    pub fn holds(&self, sigma: i8) -> bool {
        (self.measured - self.expected(sigma)).abs() <= self.intersection_bound as i64
    }
}

/// Group pole events by location and attach the residue ranks read off the
/// two Dirichlet tables.
pub fn pole_jumps(ledger: &FlowLedger, laplace: &SpectrumTable, medium: &SpectrumTable) -> Vec<PoleJump> {
    let mut out: Vec<PoleJump> = Vec::new();
    for e in ledger.events.iter().filter(|e| e.kind.is_pole()) {
        match out.last_mut() {
            Some(last) if (last.lambda - e.lambda).abs() <= 1e-9 * e.lambda.max(1.0) => last.measured += e.delta_n1,
            _ => out.push(PoleJump { lambda: e.lambda, measured: e.delta_n1, m0: 0, m_a: 0, intersection_bound: 0 }),
        }
    }
    for j in &mut out {
        j.m0 = laplace.multiplicity_at(j.lambda, 1e-9);
        j.m_a = medium.multiplicity_at(j.lambda, 1e-9);
        j.intersection_bound = j.m0.min(j.m_a);
    }
    out
}
