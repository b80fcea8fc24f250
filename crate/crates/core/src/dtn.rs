//! Per-mode Dirichlet-to-Neumann values for `-Δu = λu` and
//! `-∇·(a∇v) = λ n v`, their pole sets (the Dirichlet spectra) and the
//! counting functions.
//!
//! Separation of variables on the disk reduces both maps to multiplication
//! by a scalar on each angular mode `e^{imθ}`:
//!
//! ```text
//! f_m(λ)  = k J_m'(kR) / J_m(kR),                       k   = sqrt(λ)
//! fA_m(λ) = a k_A U_m'(k_A R) / U_m(k_A R),             k_A = sqrt(λ n / a)
//! ```
//!
//! with `U_m = J_m` without an obstacle and `U_m` the cross product vanishing
//! at `r0` otherwise.

use rayon::prelude::*;
use thiserror::Error;

use crate::media::{Media, RadialDomain};
use crate::specfun::{self, BesselOrder, SpecFunError};

/// `|U| < POLE_TOL * |(U, x U')|` marks a pole.
pub const POLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DtnError {
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("lambda = {lambda} is outside the table range [0, {lambda_max}]")]
    OutOfRange { lambda: f64, lambda_max: f64 },
    #[error("lambda_max = {0} must be positive and finite")]
    LambdaMax(f64),
}

/// A real value or the pole marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Pole,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Pole => None,
        }
    }

    pub fn is_pole(self) -> bool {
        matches!(self, ExtReal::Pole)
    }
}

/// Radial solution data `(U, x U')` at `x`, rescaled by some positive factor
/// so that neither entry underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RadialPair {
    pub u: f64,
    pub w: f64,
}

impl RadialPair {
    /// `x U'/U`.
    pub fn log_derivative(self) -> f64 {
        self.w / self.u
    }

    pub fn is_pole(self, tol: f64) -> bool {
        self.u.abs() <= tol * self.u.hypot(self.w)
    }
}

/// `J_m` has no zeros below `m`; there it is scaled by itself, elsewhere by
/// the large-argument envelope.
pub(crate) fn disk_pair(m: u32, x: f64) -> RadialPair {
    if x < f64::from(m) || x == 0.0 {
        return RadialPair { u: 1.0, w: specfun::j_log_derivative(m, x) };
    }
    let (j, dj) = specfun::j_and_prime(m, x);
    let s = specfun::envelope(x);
    RadialPair { u: j / s, w: x * dj / s }
}

/// Harmonic (`λ = 0`) log-derivative of the annulus solution vanishing at
/// `r = ratio`, outer radius 1.
fn annulus_harmonic(m: u32, ratio: f64) -> f64 {
    if m == 0 {
        1.0 / (1.0 / ratio).ln()
    } else {
        let q = ratio.powi(2 * m as i32);
        f64::from(m) * (1.0 + q) / (1.0 - q)
    }
}

/// Annulus solution `c_J Y_m(x) - c_Y J_m(x)` with `(c_J, c_Y)` the unit
/// normalized `(J_m, Y_m)` at the obstacle. Sign chosen so it reduces to
/// `J_m` as the obstacle shrinks.
pub(crate) fn annulus_pair(m: u32, x: f64, ratio: f64) -> RadialPair {
    if x == 0.0 {
        return RadialPair { u: 1.0, w: annulus_harmonic(m, ratio) };
    }
    let mf = f64::from(m);
    let (cj, cy) = specfun::cross_coefficients(m, x * ratio);
    let [j, dj, y, dy] = specfun::cylinder_jy(m, x);
    let (u, w) = if cj == 0.0 {
        (-cy * j, -cy * x * dj)
    } else {
        (cj * y - cy * j, x * (cj * dy - cy * dj))
    };
    if !(u.is_finite() && w.is_finite()) {
        return disk_pair(m, x);
    }
    // no zeros below m (annulus zeros exceed the disk zeros)
    let s = if x < mf { u.abs() } else { specfun::envelope(x) };
    RadialPair { u: u / s, w: w / s }
}

pub(crate) fn medium_pair(m: u32, lambda: f64, media: &Media, domain: &RadialDomain) -> RadialPair {
    let x = (lambda * media.index_ratio()).sqrt() * domain.radius();
    if domain.has_obstacle() {
        annulus_pair(m, x, domain.ratio())
    } else {
        disk_pair(m, x)
    }
}

pub(crate) fn laplace_pair(m: u32, lambda: f64, domain: &RadialDomain) -> RadialPair {
    disk_pair(m, lambda.sqrt() * domain.radius())
}

fn check_mode(m: u32, lambda: f64) -> Result<(), DtnError> {
    BesselOrder::new(m)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(SpecFunError::Domain { func: "dtn", x: lambda }.into());
    }
    Ok(())
}

/// Mode-`m` value of the Dirichlet-to-Neumann map of `-Δ - λ`.
pub fn f_mode(m: u32, lambda: f64, domain: &RadialDomain) -> Result<ExtReal, DtnError> {
    check_mode(m, lambda)?;
    let p = laplace_pair(m, lambda, domain);
    Ok(if p.is_pole(POLE_TOL) {
        ExtReal::Pole
    } else {
        ExtReal::Finite(p.log_derivative() / domain.radius())
    })
}

/// Mode-`m` value of the Dirichlet-to-co-normal map of `-∇·a∇ - λn`.
pub fn fa_mode(m: u32, lambda: f64, media: &Media, domain: &RadialDomain) -> Result<ExtReal, DtnError> {
    check_mode(m, lambda)?;
    let p = medium_pair(m, lambda, media, domain);
    Ok(if p.is_pole(POLE_TOL) {
        ExtReal::Pole
    } else {
        ExtReal::Finite(media.a() * p.log_derivative() / domain.radius())
    })
}

/// Which operator a spectrum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `-Δ` on `O` with Dirichlet data.
    Laplace,
    /// `-∇·a∇ / n` on `O \ V` with Dirichlet data.
    Medium,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Laplace => "D",
            Family::Medium => "A",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub lambda: f64,
    pub mode: BesselOrder,
    pub multiplicity: usize,
}

/// Eigenvalues up to `lambda_max`, ascending, with angular multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub family: Family,
    pub lambda_max: f64,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumTable {
    fn from_modes(family: Family, lambda_max: f64, per_mode: Vec<(u32, Vec<f64>)>) -> Self {
        let mut entries: Vec<SpectrumEntry> = per_mode
            .into_iter()
            .flat_map(|(m, lams)| {
                let mode = BesselOrder(m);
                lams.into_iter()
                    .map(move |lambda| SpectrumEntry { lambda, mode, multiplicity: mode.multiplicity() })
            })
            .collect();
        entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.mode.cmp(&b.mode)));
        Self { family, lambda_max, entries }
    }

    /// Number of eigenvalues `<= lambda`, with multiplicity.
    pub fn counting(&self, lambda: f64) -> Result<usize, DtnError> {
        if !(lambda >= 0.0 && lambda <= self.lambda_max) {
            return Err(DtnError::OutOfRange { lambda, lambda_max: self.lambda_max });
        }
        Ok(self.count_unchecked(lambda))
    }

    pub(crate) fn count_unchecked(&self, lambda: f64) -> usize {
        let end = self.entries.partition_point(|e| e.lambda <= lambda);
        self.entries[..end].iter().map(|e| e.multiplicity).sum()
    }

    /// Eigenvalues repeated by multiplicity: `lambda_1 <= lambda_2 <= ...`.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.lambda, e.multiplicity))
            .collect()
    }

    /// Eigenvalues carried by mode `m`.
    pub fn mode_values(&self, m: u32) -> Vec<f64> {
        self.entries.iter().filter(|e| e.mode.0 == m).map(|e| e.lambda).collect()
    }

    /// Total multiplicity of eigenvalues within `tol * max(1, lambda)` of `lambda`.
    pub fn multiplicity_at(&self, lambda: f64, tol: f64) -> usize {
        let t = tol * lambda.max(1.0);
        self.entries.iter().filter(|e| (e.lambda - lambda).abs() <= t).map(|e| e.multiplicity).sum()
    }
}

fn check_lambda_max(lambda_max: f64) -> Result<(), DtnError> {
    if lambda_max.is_finite() && lambda_max > 0.0 {
        Ok(())
    } else {
        Err(DtnError::LambdaMax(lambda_max))
    }
}

/// Collect `zeros(m, xmax)` over all modes that have one below `xmax`.
fn scan_modes(
    xmax: f64,
    zeros: impl Fn(u32, f64) -> Result<Vec<f64>, SpecFunError> + Sync,
) -> Result<Vec<(u32, Vec<f64>)>, DtnError> {
    // j_{m,1} > m bounds the number of contributing modes
    let top = xmax.ceil().min(f64::from(specfun::MAX_ORDER)) as u32;
    let per_mode: Vec<(u32, Vec<f64>)> = (0..=top)
        .into_par_iter()
        .map(|m| zeros(m, xmax).map(|z| (m, z)))
        .collect::<Result<_, _>>()?;
    if xmax > f64::from(specfun::MAX_ORDER) {
        return Err(SpecFunError::OrderTooLarge(specfun::MAX_ORDER + 1).into());
    }
    Ok(per_mode.into_iter().filter(|(_, z)| !z.is_empty()).collect())
}

/// Dirichlet eigenvalues of `-Δ` on the disk of radius `R`.
pub fn dirichlet_spectrum(domain: &RadialDomain, lambda_max: f64) -> Result<SpectrumTable, DtnError> {
    check_lambda_max(lambda_max)?;
    let r = domain.radius();
    let modes = scan_modes(lambda_max.sqrt() * r, specfun::bessel_zeros_below)?;
    let per_mode = modes
        .into_iter()
        .map(|(m, z)| (m, z.into_iter().map(|x| (x / r).powi(2)).collect()))
        .collect();
    Ok(SpectrumTable::from_modes(Family::Laplace, lambda_max, per_mode))
}

/// Dirichlet eigenvalues of `-∇·a∇ v = λ n v` on `O \ V`.
pub fn dirichlet_a_spectrum(media: &Media, domain: &RadialDomain, lambda_max: f64) -> Result<SpectrumTable, DtnError> {
    check_lambda_max(lambda_max)?;
    let r = domain.radius();
    let scale = 1.0 / media.index_ratio();
    let xmax = (lambda_max * media.index_ratio()).sqrt() * r;
    let modes = if domain.has_obstacle() {
        let ratio = domain.ratio();
        scan_modes(xmax, move |m, x| specfun::cross_product_zeros_below(m, ratio, x))?
    } else {
        scan_modes(xmax, specfun::bessel_zeros_below)?
    };
    let per_mode = modes
        .into_iter()
        .map(|(m, z)| (m, z.into_iter().map(|x| scale * (x / r).powi(2)).collect()))
        .collect();
    Ok(SpectrumTable::from_modes(Family::Medium, lambda_max, per_mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const J01: f64 = 2.404825557695773;
    const J11: f64 = 3.831705970207512;

    fn unit_disk() -> RadialDomain {
        RadialDomain::disk(1.0).unwrap()
    }

    #[test]
    fn harmonic_values() {
        let d = unit_disk();
        assert_eq!(f_mode(1, 0.0, &d).unwrap(), ExtReal::Finite(1.0));
        assert_eq!(f_mode(0, 0.0, &d).unwrap(), ExtReal::Finite(0.0));
        let m = Media::new(0.5, 0.25, 2).unwrap();
        assert_eq!(fa_mode(1, 0.0, &m, &d).unwrap(), ExtReal::Finite(0.5));

        let ann = RadialDomain::new(1.0, 0.3).unwrap();
        let m2 = Media::new(2.0, 3.0, 2).unwrap();
        let v = fa_mode(0, 0.0, &m2, &ann).unwrap().finite().unwrap();
        assert_abs_diff_eq!(v, 2.0 / (1.0f64 / 0.3).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 1.6612, epsilon = 1e-4);
        let v1 = fa_mode(2, 0.0, &m2, &ann).unwrap().finite().unwrap();
        assert_abs_diff_eq!(v1, 2.0 * 2.0 * (1.0 + 0.3f64.powi(4)) / (1.0 - 0.3f64.powi(4)), epsilon = 1e-14);
    }

    #[test]
    fn harmonic_limit_is_continuous_with_obstacle() {
        let ann = RadialDomain::new(1.0, 0.3).unwrap();
        let m2 = Media::new(2.0, 3.0, 2).unwrap();
        for m in [0, 1, 3] {
            let at0 = fa_mode(m, 0.0, &m2, &ann).unwrap().finite().unwrap();
            let near = fa_mode(m, 1e-8, &m2, &ann).unwrap().finite().unwrap();
            assert!((at0 - near).abs() < 1e-6, "m={m}: {at0} vs {near}");
        }
    }

    #[test]
    fn poles_at_dirichlet_eigenvalues() {
        let d = unit_disk();
        assert!(f_mode(0, J01 * J01, &d).unwrap().is_pole());
        let m = Media::new(0.5, 0.25, 2).unwrap();
        assert!(fa_mode(0, 2.0 * J01 * J01, &m, &d).unwrap().is_pole());
        assert!(!fa_mode(0, J01 * J01, &m, &d).unwrap().is_pole());
    }

    #[test]
    fn spectrum_tables() {
        let d = unit_disk();
        let t6 = dirichlet_spectrum(&d, 6.0).unwrap();
        assert_eq!(t6.entries.len(), 1);
        assert_abs_diff_eq!(t6.entries[0].lambda, J01 * J01, epsilon = 1e-10);
        assert_abs_diff_eq!(t6.entries[0].lambda, 5.7832, epsilon = 1e-4);
        let t15 = dirichlet_spectrum(&d, 15.0).unwrap();
        assert_eq!(t15.entries.len(), 2);
        assert_eq!(t15.entries[1].mode, BesselOrder(1));
        assert_eq!(t15.entries[1].multiplicity, 2);
        assert_abs_diff_eq!(t15.entries[1].lambda, J11 * J11, epsilon = 1e-10);
        assert_abs_diff_eq!(t15.entries[1].lambda, 14.6820, epsilon = 1e-4);
        assert_eq!(t15.counting(5.0).unwrap(), 0);
        assert_eq!(t15.counting(6.0).unwrap(), 1);
        assert_eq!(t15.counting(15.0).unwrap(), 3);
        assert!(t15.counting(16.0).is_err());
        assert_eq!(t15.expanded().len(), 3);
    }

    #[test]
    fn medium_spectrum_is_scaled_copy_without_obstacle() {
        let d = unit_disk();
        let m = Media::new(0.5, 0.25, 2).unwrap();
        let ta = dirichlet_a_spectrum(&m, &d, 200.0).unwrap();
        assert_abs_diff_eq!(ta.entries[0].lambda, 2.0 * J01 * J01, epsilon = 1e-9);
        assert_abs_diff_eq!(ta.entries[0].lambda, 11.566, epsilon = 1e-3);
        let t = dirichlet_spectrum(&d, 100.0).unwrap();
        for i in 0..20 {
            let lam = 3.0 + 9.7 * i as f64;
            assert_eq!(ta.counting(lam).unwrap(), t.counting(lam * 0.5).unwrap());
        }
    }

    #[test]
    fn annulus_medium_spectrum() {
        let ann = RadialDomain::new(1.0, 0.3).unwrap();
        let m = Media::new(2.0, 3.0, 2).unwrap();
        let ta = dirichlet_a_spectrum(&m, &ann, 200.0).unwrap();
        let first = ta.entries[0];
        let k = (first.lambda * 1.5).sqrt();
        assert!(specfun::cross_product(first.mode.0, 0.3, k).unwrap().abs() <= 1e-10);
        assert!(fa_mode(first.mode.0, first.lambda, &m, &ann).unwrap().is_pole());
        // annulus eigenvalues lie above the disk ones
        let disk = dirichlet_a_spectrum(&m, &RadialDomain::disk(1.0).unwrap(), 200.0).unwrap();
        assert!(first.lambda > disk.entries[0].lambda);
    }

    #[test]
    fn weyl_asymptotics_for_disk() {
        let t = dirichlet_spectrum(&unit_disk(), 2000.0).unwrap();
        let ratio = t.counting(2000.0).unwrap() as f64 / 2000.0;
        assert!((ratio - 0.25).abs() <= 0.05, "N/lambda = {ratio}");
    }
}
