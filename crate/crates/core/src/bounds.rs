//! Counting-function bounds checked against computed spectra.

use thiserror::Error;

use crate::dtn::SpectrumTable;
use crate::flow::FlowLedger;
use crate::ite::IteSpectrum;
use crate::media::{Media, RadialDomain, WeylConstants};

/// Relative slack on the lower Weyl slope.
pub const SLOPE_SLACK: f64 = 0.1;
/// Relative slack on the upper Weyl bound.
pub const UPPER_SLACK: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    /// `N_T >= σ(N - N_A) - n⁻(0)` on a grid.
    MainInequality,
    /// `N_T(λ)/λ^{d/2} >= ω_d/(2π)^d γ` when `γ > 0`.
    WeylSlope,
    /// `n⁻(0) = 0` for sign-definite `I - A`.
    ZeroIndex,
    /// Upper bound on the first positive ITE from the first Dirichlet gap.
    FirstIteUpper,
    /// Lower bound on the first positive ITE.
    FaberKrahn,
    /// `N_T(λ) <= ω_d/(2π)^d (Vol O + (n/a)^{d/2} Vol(O\V)) λ^{d/2}`.
    UpperWeyl,
    /// Upper bounds from the next Dirichlet gap.
    HigherIteUpper,
}

impl BoundId {
    pub fn tag(self) -> &'static str {
        match self {
            BoundId::MainInequality => "main_inequality",
            BoundId::WeylSlope => "weyl_slope",
            BoundId::ZeroIndex => "zero_index",
            BoundId::FirstIteUpper => "first_ite_upper",
            BoundId::FaberKrahn => "faber_krahn",
            BoundId::UpperWeyl => "upper_weyl",
            BoundId::HigherIteUpper => "higher_ite_upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable,
}

impl Verdict {
    pub fn tag(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::NotApplicable => "not_applicable",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub id: BoundId,
    pub verdict: Verdict,
    pub lhs: f64,
    pub rhs: f64,
    /// Relative slack applied to `rhs` (zero for exact counting claims).
    pub tolerance: f64,
    pub detail: String,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    fn not_applicable(id: BoundId, detail: impl Into<String>) -> Self {
        Self { id, verdict: Verdict::NotApplicable, lhs: f64::NAN, rhs: f64::NAN, tolerance: 0.0, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("lower bound {lower} ({lower_id}) exceeds upper bound {upper} ({upper_id}) on the first positive ITE")]
    Inconsistent { lower_id: &'static str, lower: f64, upper_id: &'static str, upper: f64 },
}

/// Everything the checks read.
#[derive(Debug, Clone, Copy)]
pub struct Evidence<'a> {
    pub media: &'a Media,
    pub domain: &'a RadialDomain,
    pub sigma: i8,
    pub ledger: &'a FlowLedger,
    pub laplace: &'a SpectrumTable,
    pub medium: &'a SpectrumTable,
    pub ites: &'a IteSpectrum,
}

impl Evidence<'_> {
    fn lambda_max(&self) -> f64 {
        self.ites.lambda_max
    }

    fn half_d(&self) -> f64 {
        f64::from(self.media.d()) / 2.0
    }

    fn weyl(&self) -> f64 {
        WeylConstants::new(self.media.d()).weyl_coefficient()
    }

    /// The constant-coefficient statements need no obstacle.
    fn simple_case(&self) -> bool {
        !self.domain.has_obstacle()
    }
}

/// `sgn(1 - a) (Vol O - (n/a)^{d/2} Vol(O \ V))`.
pub fn gamma(media: &Media, domain: &RadialDomain) -> f64 {
    let (vol, vol_shell) = domain.volume(media.d());
    let s = if media.a() < 1.0 { 1.0 } else { -1.0 };
    s * (vol - media.index_ratio().powf(f64::from(media.d()) / 2.0) * vol_shell)
}

pub fn check_main_inequality(ev: &Evidence, grid_points: usize) -> BoundReport {
    let lmax = ev.lambda_max();
    let n0 = ev.ledger.n_minus_0 as i64;
    let sigma = i64::from(ev.sigma);
    let mut worst: Option<(i64, f64, i64, i64)> = None;
    for i in 1..=grid_points {
        let lam = lmax * i as f64 / grid_points as f64;
        let nt = ev.ites.counting(lam) as i64;
        let rhs = sigma * (ev.laplace.count_unchecked(lam) as i64 - ev.medium.count_unchecked(lam) as i64) - n0;
        let margin = nt - rhs;
        if worst.is_none_or(|w| margin < w.0 || (margin == w.0 && rhs > w.3)) {
            worst = Some((margin, lam, nt, rhs));
        }
    }
    let Some((margin, lam, nt, rhs)) = worst else {
        return BoundReport::not_applicable(BoundId::MainInequality, "empty grid");
    };
    BoundReport {
        id: BoundId::MainInequality,
        verdict: Verdict::from_bool(margin >= 0),
        lhs: nt as f64,
        rhs: rhs as f64,
        tolerance: 0.0,
        detail: format!("tightest of {grid_points} grid points at lambda = {lam:.6}, n-(0) = {n0}"),
    }
}

/// Least-squares slope of `N_T` against `λ^{d/2}` through the origin over
/// `[λ_max/2, λ_max]`.
pub fn check_weyl_slope(ev: &Evidence, grid_points: usize) -> BoundReport {
    let g = gamma(ev.media, ev.domain);
    if g <= 0.0 {
        return BoundReport::not_applicable(BoundId::WeylSlope, format!("gamma = {g:.6} <= 0"));
    }
    let lmax = ev.lambda_max();
    let pts = grid_points.max(2);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for i in 0..pts {
        let lam = lmax * (0.5 + 0.5 * i as f64 / (pts - 1) as f64);
        let x = lam.powf(ev.half_d());
        sxy += x * ev.ites.counting(lam) as f64;
        sxx += x * x;
    }
    let slope = sxy / sxx;
    let bound = ev.weyl() * g;
    BoundReport {
        id: BoundId::WeylSlope,
        verdict: Verdict::from_bool(slope >= bound * (1.0 - SLOPE_SLACK)),
        lhs: slope,
        rhs: bound,
        tolerance: SLOPE_SLACK,
        detail: format!("gamma = {g:.12}, fit over [{:.3}, {lmax:.3}]", 0.5 * lmax),
    }
}

pub fn check_zero_index(ev: &Evidence) -> BoundReport {
    let a = ev.media.a();
    let applicable = (ev.simple_case() && a != 1.0) || (ev.domain.has_obstacle() && a > 1.0);
    if !applicable {
        return BoundReport::not_applicable(BoundId::ZeroIndex, "obstacle with A < I");
    }
    let n0 = ev.ledger.n_minus_0;
    BoundReport {
        id: BoundId::ZeroIndex,
        verdict: Verdict::from_bool(n0 == 0),
        lhs: n0 as f64,
        rhs: 0.0,
        tolerance: 0.0,
        detail: "n-(0) by direct mode evaluation at lambda = 0".into(),
    }
}

/// Report an upper bound on an ITE that must exist below `bound`.
fn upper_report(id: BoundId, ite: Option<f64>, bound: f64, strict: bool, lmax: f64, detail: String) -> BoundReport {
    match ite {
        Some(l) => BoundReport {
            id,
            verdict: Verdict::from_bool(if strict { l < bound } else { l <= bound }),
            lhs: l,
            rhs: bound,
            tolerance: 0.0,
            detail,
        },
        None if bound <= lmax => BoundReport { id, verdict: Verdict::Violated, lhs: f64::INFINITY, rhs: bound, tolerance: 0.0, detail },
        None => BoundReport::not_applicable(id, format!("{detail}; bound beyond lambda_max")),
    }
}

pub fn check_first_ite_upper(ev: &Evidence) -> BoundReport {
    let id = BoundId::FirstIteUpper;
    if !ev.simple_case() {
        return BoundReport::not_applicable(id, "obstacle present");
    }
    let lam = ev.laplace.expanded();
    if lam.len() < 2 {
        return BoundReport::not_applicable(id, "fewer than two Dirichlet eigenvalues below lambda_max");
    }
    let (a, n) = (ev.media.a(), ev.media.n());
    let (l1, l2) = (lam[0], lam[1]);
    let (hyp, bound, detail) = if a < 1.0 {
        (n * l2 < a * l1, l2, format!("n*lambda_2 = {:.6} < a*lambda_1 = {:.6}", n * l2, a * l1))
    } else {
        (a * l2 < n * l1, a / n * l2, format!("a*lambda_2 = {:.6} < n*lambda_1 = {:.6}", a * l2, n * l1))
    };
    if !hyp {
        return BoundReport::not_applicable(id, format!("hypothesis fails: {detail}"));
    }
    upper_report(id, ev.ites.first_positive(), bound, false, ev.lambda_max(), detail)
}

pub fn check_higher_ite_upper(ev: &Evidence) -> BoundReport {
    let id = BoundId::HigherIteUpper;
    if !ev.simple_case() {
        return BoundReport::not_applicable(id, "obstacle present");
    }
    let lam = ev.laplace.expanded();
    if lam.len() < 3 {
        return BoundReport::not_applicable(id, "fewer than three Dirichlet eigenvalues below lambda_max");
    }
    let ratio = ev.media.a() / ev.media.n();
    let ites = ev.ites.expanded_positive();
    if ev.sigma == 1 {
        let hyp = lam[2] / lam[1] < ratio;
        let detail = format!("lambda_3/lambda_2 = {:.6} < a/n = {ratio:.6}", lam[2] / lam[1]);
        if !hyp {
            return BoundReport::not_applicable(id, format!("hypothesis fails: {detail}"));
        }
        upper_report(id, ites.first().copied(), lam[2], true, ev.lambda_max(), format!("first ITE; {detail}"))
    } else {
        let hyp = lam[2] / lam[0] < 1.0 / ratio;
        let detail = format!("lambda_3/lambda_1 = {:.6} < n/a = {:.6}", lam[2] / lam[0], 1.0 / ratio);
        if !hyp {
            return BoundReport::not_applicable(id, format!("hypothesis fails: {detail}"));
        }
        upper_report(id, ites.get(1).copied(), ratio * lam[2], true, ev.lambda_max(), format!("second ITE; {detail}"))
    }
}

/// Applies only where it is consistent with the computed spectra: no
/// obstacle and `(1 - n)(a - 1) > 0`.
pub fn check_faber_krahn(ev: &Evidence) -> BoundReport {
    let id = BoundId::FaberKrahn;
    let (a, n) = (ev.media.a(), ev.media.n());
    if !ev.simple_case() {
        return BoundReport::not_applicable(id, "obstacle present");
    }
    if (1.0 - n) * (a - 1.0) <= 0.0 {
        return BoundReport::not_applicable(id, format!("(1 - n)(a - 1) = {:.6} <= 0", (1.0 - n) * (a - 1.0)));
    }
    let Some(&l1) = ev.laplace.expanded().first() else {
        return BoundReport::not_applicable(id, "no Dirichlet eigenvalue below lambda_max");
    };
    let bound = if a < 1.0 { a / n * l1 } else { l1 };
    match ev.ites.first_positive() {
        Some(t) => BoundReport {
            id,
            verdict: Verdict::from_bool(t >= bound * (1.0 - 1e-12)),
            lhs: t,
            rhs: bound,
            tolerance: 0.0,
            detail: if a < 1.0 { "(a/n) lambda_1".into() } else { "lambda_1".into() },
        },
        None => BoundReport::not_applicable(id, "no positive ITE below lambda_max"),
    }
}

pub fn check_upper_weyl(ev: &Evidence) -> BoundReport {
    let lmax = ev.lambda_max();
    let (vol, shell) = ev.domain.volume(ev.media.d());
    let mass = vol + ev.media.index_ratio().powf(ev.half_d()) * shell;
    let bound = ev.weyl() * mass * lmax.powf(ev.half_d());
    let nt = ev.ites.counting(lmax) as f64;
    BoundReport {
        id: BoundId::UpperWeyl,
        verdict: Verdict::from_bool(nt <= bound * (1.0 + UPPER_SLACK)),
        lhs: nt,
        rhs: bound,
        tolerance: UPPER_SLACK,
        detail: format!("at lambda_max = {lmax}"),
    }
}

/// All reports, in [`BoundId`] order.
pub fn check_all(ev: &Evidence, grid_points: usize) -> Vec<BoundReport> {
    vec![
        check_main_inequality(ev, grid_points),
        check_weyl_slope(ev, grid_points),
        check_zero_index(ev),
        check_first_ite_upper(ev),
        check_faber_krahn(ev),
        check_upper_weyl(ev),
        check_higher_ite_upper(ev),
    ]
}

/// An applicable lower bound on `λ₁ᵀ` must not exceed an applicable upper one.
pub fn check_consistency(reports: &[BoundReport]) -> Result<(), BoundsError> {
    let applicable = |id| reports.iter().find(|r| r.id == id && r.verdict != Verdict::NotApplicable);
    let (Some(lower), Some(upper)) = (applicable(BoundId::FaberKrahn), applicable(BoundId::FirstIteUpper)) else {
        return Ok(());
    };
    if lower.rhs > upper.rhs {
        return Err(BoundsError::Inconsistent {
            lower_id: lower.id.tag(),
            lower: lower.rhs,
            upper_id: upper.id.tag(),
            upper: upper.rhs,
        });
    }
    Ok(())
}
