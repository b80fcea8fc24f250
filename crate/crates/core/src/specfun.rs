//! Integer-order cylinder functions of real argument.
//!
//! `J_m` is evaluated with its ascending series where that series has no
//! cancellation, and with Miller's backward recurrence (normalized by
//! `J_0 + 2 sum J_2k = 1`) elsewhere. `Y_0` and `Y_1` come from the Neumann
//! series over the same normalized `J` sequence, higher orders from the
//! (stable) forward recurrence.
//!
//! Zero finders bracket by scanning with a step shorter than the minimum
//! zero spacing, bisect, then polish with a few Newton steps.

use std::f64::consts::{FRAC_2_PI, PI};

use thiserror::Error;

/// Largest supported order.
pub const MAX_ORDER: u32 = 200;
/// Largest supported argument.
pub const MAX_ARG: f64 = 1000.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Scan step for zero bracketing. Consecutive zeros of `J_m` and of the
/// annulus cross products are never closer than 3.1.
const SCAN_STEP: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("{func}: argument {x} outside the supported domain")]
    Domain { func: &'static str, x: f64 },
    #[error("order {0} exceeds the supported cap {MAX_ORDER}")]
    OrderTooLarge(u32),
    #[error("could not bracket zero number {s} of order {m} below x = {MAX_ARG}")]
    Bracket { m: u32, s: usize },
    #[error("radius ratio {0} must lie strictly between 0 and 1")]
    Ratio(f64),
}

pub type Result<T> = std::result::Result<T, SpecFunError>;

/// Angular mode index of a separated solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BesselOrder(pub u32);

impl BesselOrder {
    pub fn new(m: u32) -> Result<Self> {
        check_order(m)?;
        Ok(Self(m))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Number of independent angular functions (cos, sin) carried by the mode.
    pub fn multiplicity(self) -> usize {
        if self.0 == 0 {
            1
        } else {
            2
        }
    }
}

impl From<u32> for BesselOrder {
    fn from(m: u32) -> Self {
        Self(m)
    }
}

impl std::fmt::Display for BesselOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn check_order(m: u32) -> Result<()> {
    if m > MAX_ORDER {
        Err(SpecFunError::OrderTooLarge(m))
    } else {
        Ok(())
    }
}

fn check_arg(func: &'static str, x: f64, allow_zero: bool) -> Result<()> {
    let ok = x.is_finite() && x <= MAX_ARG && if allow_zero { x >= 0.0 } else { x > 0.0 };
    if ok {
        Ok(())
    } else {
        Err(SpecFunError::Domain { func, x })
    }
}

/// The ascending series only adds terms of one magnitude trend here.
fn series_is_safe(m: u32, x: f64) -> bool {
    x <= 4.0 || x * x <= 4.0 * (f64::from(m) + 1.0)
}

fn j_series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=m {
        term *= half / f64::from(i);
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + f64::from(m)));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn miller_start(nmax: u32, x: f64) -> usize {
    let base = f64::from(nmax).max(x);
    let n = (base + 20.0 + (40.0 * base).sqrt()).ceil() as usize;
    n + (n % 2)
}

/// Normalized `J_0(x), ..., J_N(x)` for `x > 0`, where `N >= nmax` is the
/// recurrence start index.
fn j_sequence(nmax: u32, x: f64) -> Vec<f64> {
    let top = miller_start(nmax, x);
    let mut vals = vec![0.0; top + 2];
    vals[top] = 1.0;
    for k in (1..=top).rev() {
        let next = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        vals[k - 1] = next;
        if next.abs() > 1e250 {
            for v in &mut vals[k - 1..] {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = vals[0];
    for k in (2..=top).step_by(2) {
        norm += 2.0 * vals[k];
    }
    vals.truncate(top + 1);
    for v in &mut vals {
        *v /= norm;
    }
    vals
}

/// `J_m(x)`.
pub fn bessel_j(m: u32, x: f64) -> Result<f64> {
    check_order(m)?;
    check_arg("bessel_j", x, true)?;
    Ok(j_unchecked(m, x))
}

fn j_unchecked(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if series_is_safe(m, x) {
        j_series(m, x)
    } else {
        j_sequence(m, x)[m as usize]
    }
}

/// `J_m'(x)` from `J_m' = J_{m-1} - (m/x) J_m`, `J_0' = -J_1`.
pub fn bessel_j_prime(m: u32, x: f64) -> Result<f64> {
    check_order(m)?;
    check_arg("bessel_j_prime", x, true)?;
    Ok(j_and_prime(m, x).1)
}

/// `(J_m(x), J_m'(x))`.
pub(crate) fn j_and_prime(m: u32, x: f64) -> (f64, f64) {
    if x == 0.0 {
        let j = if m == 0 { 1.0 } else { 0.0 };
        let dj = if m == 1 { 0.5 } else { 0.0 };
        return (j, dj);
    }
    if series_is_safe(m + 1, x) {
        let j = j_series(m, x);
        let dj = if m == 0 {
            -j_series(1, x)
        } else {
            j_series(m - 1, x) - f64::from(m) / x * j
        };
        return (j, dj);
    }
    let seq = j_sequence(m + 1, x);
    let j = seq[m as usize];
    let dj = if m == 0 {
        -seq[1]
    } else {
        seq[m as usize - 1] - f64::from(m) / x * j
    };
    (j, dj)
}

/// `x J_m'(x) / J_m(x)` from the backward-recurrence ratio `J_{m+1}/J_m`.
/// Stays finite where `J_m` itself underflows; infinite at zeros of `J_m`.
pub(crate) fn j_log_derivative(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return f64::from(m);
    }
    let top = miller_start(m + 1, x);
    let (mut upper, mut cur) = (0.0_f64, 1.0_f64);
    for k in ((m as usize + 1)..=top).rev() {
        let lower = 2.0 * k as f64 / x * cur - upper;
        upper = cur;
        cur = lower;
        if cur.abs() > 1e250 {
            upper *= 1e-250;
            cur *= 1e-250;
        }
    }
    // cur ~ J_m, upper ~ J_{m+1}
    f64::from(m) - x * upper / cur
}

/// `Y_m(x)`, `x > 0`.
pub fn bessel_y(m: u32, x: f64) -> Result<f64> {
    check_order(m)?;
    check_arg("bessel_y", x, false)?;
    Ok(y_and_prime_from(m, x, &j_sequence(1, x)).0)
}

/// `Y_m'(x)` from `Y_m' = Y_{m-1} - (m/x) Y_m`, `Y_0' = -Y_1`.
pub fn bessel_y_prime(m: u32, x: f64) -> Result<f64> {
    check_order(m)?;
    check_arg("bessel_y_prime", x, false)?;
    Ok(y_and_prime_from(m, x, &j_sequence(1, x)).1)
}

fn y01(x: f64, seq: &[f64]) -> (f64, f64) {
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k < seq.len() {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * seq[2 * k] / kf;
        if 2 * k + 1 < seq.len() {
            s1 -= sign * (2.0 * kf + 1.0) / (kf * (kf + 1.0)) * seq[2 * k + 1];
        }
        k += 1;
    }
    let y0 = FRAC_2_PI * log_term * seq[0] - 2.0 * FRAC_2_PI * s0;
    let y1 = FRAC_2_PI * (log_term - 1.0) * seq[1] - FRAC_2_PI / x * seq[0] + FRAC_2_PI * s1;
    (y0, y1)
}

fn y_and_prime_from(m: u32, x: f64, seq: &[f64]) -> (f64, f64) {
    let (y0, y1) = y01(x, seq);
    if m == 0 {
        return (y0, -y1);
    }
    let (mut prev, mut cur) = (y0, y1);
    for k in 1..m {
        let next = 2.0 * f64::from(k) / x * cur - prev;
        prev = cur;
        cur = next;
    }
    (cur, prev - f64::from(m) / x * cur)
}

/// `(J_m, J_m', Y_m, Y_m')` at `x > 0` from a single recurrence run.
pub(crate) fn cylinder_jy(m: u32, x: f64) -> [f64; 4] {
    let seq = j_sequence(m + 1, x);
    let j = seq[m as usize];
    let dj = if m == 0 {
        -seq[1]
    } else {
        seq[m as usize - 1] - f64::from(m) / x * j
    };
    let (y, dy) = y_and_prime_from(m, x, &seq);
    [j, dj, y, dy]
}

/// Bisect a sign change of `f` on `[lo, hi]` down to `width`.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scan `f` upward from `start` in steps of [`SCAN_STEP`], collecting
/// bracketed zeros until `stop` says enough.
fn scan_zeros(
    f: impl Fn(f64) -> f64,
    polish: impl Fn(f64, f64, f64) -> f64,
    start: f64,
    m: u32,
    mut stop: impl FnMut(&[f64], f64) -> bool,
) -> Result<Vec<f64>> {
    let mut zeros = Vec::new();
    let mut lo = start;
    let mut flo = f(lo);
    loop {
        if stop(&zeros, lo) {
            return Ok(zeros);
        }
        let hi = (lo + SCAN_STEP).min(MAX_ARG);
        if hi <= lo {
            return Err(SpecFunError::Bracket { m, s: zeros.len() + 1 });
        }
        let fhi = f(hi);
        if flo == 0.0 && lo > start {
            zeros.push(lo);
        } else if (flo < 0.0) != (fhi < 0.0) && fhi != 0.0 {
            zeros.push(polish(lo, hi, flo));
        }
        lo = hi;
        flo = fhi;
    }
}

fn j_zero_polish(m: u32, lo: f64, hi: f64) -> f64 {
    let mut x = bisect(|t| j_unchecked(m, t), lo, hi, 1e-8);
    for _ in 0..5 {
        let (j, dj) = j_and_prime(m, x);
        if dj == 0.0 {
            break;
        }
        let next = x - j / dj;
        if !(lo..=hi).contains(&next) {
            break;
        }
        let done = (next - x).abs() <= 1e-15 * x;
        x = next;
        if done {
            break;
        }
    }
    x
}

/// First `count` positive zeros `j_{m,1} < j_{m,2} < ...` of `J_m`.
pub fn bessel_zeros(m: u32, count: usize) -> Result<Vec<f64>> {
    check_order(m)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    // j_{m,1} > m, so the scan may start there.
    scan_zeros(
        |x| j_unchecked(m, x),
        |lo, hi, _| j_zero_polish(m, lo, hi),
        f64::from(m),
        m,
        |zeros, _| zeros.len() >= count,
    )
}

/// All positive zeros of `J_m` not exceeding `xmax`.
pub fn bessel_zeros_below(m: u32, xmax: f64) -> Result<Vec<f64>> {
    check_order(m)?;
    check_arg("bessel_zeros_below", xmax, true)?;
    let mut zeros = scan_zeros(
        |x| j_unchecked(m, x),
        |lo, hi, _| j_zero_polish(m, lo, hi),
        f64::from(m),
        m,
        |_, x| x > xmax,
    )?;
    zeros.retain(|&z| z <= xmax);
    Ok(zeros)
}

/// Unit-normalized coefficients `(c_J, c_Y) = (J_m(t), Y_m(t)) / |.|` of the
/// radial solution vanishing at argument `t`. `Y_m` overflow collapses the
/// pair to `(0, -1)`.
pub(crate) fn cross_coefficients(m: u32, t: f64) -> (f64, f64) {
    let [j, _, y, _] = cylinder_jy(m, t);
    if !y.is_finite() {
        return (0.0, -1.0);
    }
    let rho = j.hypot(y);
    (j / rho, y / rho)
}

/// Normalized cross product `c_Y J_m(k) - c_J Y_m(k)` for the radial
/// solution on the annulus `ratio < r < 1` that vanishes at `r = ratio`.
/// Proportional (by a positive factor) to
/// `J_m(k r) Y_m(k ratio) - Y_m(k r) J_m(k ratio)` at `r = 1`.
pub fn cross_product(m: u32, ratio: f64, k: f64) -> Result<f64> {
    check_order(m)?;
    check_ratio(ratio)?;
    check_arg("cross_product", k, false)?;
    Ok(cross_unchecked(m, ratio, k))
}

fn check_ratio(ratio: f64) -> Result<()> {
    if ratio > 0.0 && ratio < 1.0 {
        Ok(())
    } else {
        Err(SpecFunError::Ratio(ratio))
    }
}

fn cross_unchecked(m: u32, ratio: f64, k: f64) -> f64 {
    let (cj, cy) = cross_coefficients(m, k * ratio);
    let [j, _, y, _] = cylinder_jy(m, k);
    if cj == 0.0 {
        cy * j
    } else {
        cy * j - cj * y
    }
}

fn cross_scan_start(m: u32) -> f64 {
    // Annulus zeros exceed the disk zeros of the same order, which exceed m.
    f64::from(m).max(1e-3)
}

/// First `count` positive zeros in `k` of the annulus cross product with
/// inner/outer radius ratio `ratio`, outer radius normalized to 1.
pub fn cross_product_zeros(m: u32, ratio: f64, count: usize) -> Result<Vec<f64>> {
    check_order(m)?;
    check_ratio(ratio)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    scan_zeros(
        |k| cross_unchecked(m, ratio, k),
        |lo, hi, _| bisect(|k| cross_unchecked(m, ratio, k), lo, hi, 1e-15 * hi),
        cross_scan_start(m),
        m,
        |zeros, _| zeros.len() >= count,
    )
}

/// All annulus cross-product zeros not exceeding `kmax`.
pub fn cross_product_zeros_below(m: u32, ratio: f64, kmax: f64) -> Result<Vec<f64>> {
    check_order(m)?;
    check_ratio(ratio)?;
    check_arg("cross_product_zeros_below", kmax, true)?;
    let mut zeros = scan_zeros(
        |k| cross_unchecked(m, ratio, k),
        |lo, hi, _| bisect(|k| cross_unchecked(m, ratio, k), lo, hi, 1e-15 * hi),
        cross_scan_start(m),
        m,
        |_, k| k > kmax,
    )?;
    zeros.retain(|&z| z <= kmax);
    Ok(zeros)
}

/// Large-argument amplitude `sqrt(2 / (pi x))` of the cylinder functions.
pub(crate) fn envelope(x: f64) -> f64 {
    (2.0 / (PI * x.max(1.0))).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Plain bisection on the series-evaluated function, independent of the
    /// polished zero finder.
    fn oracle_zero(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (f(lo) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Direct power series, summed without any switchover.
    fn raw_series(m: u32, x: f64) -> f64 {
        (0..80)
            .map(|k| {
                let mut t = if k % 2 == 0 { 1.0 } else { -1.0 };
                for i in 1..=k {
                    t *= 0.5 * x / f64::from(i);
                }
                for i in 1..=(k + m) {
                    t *= 0.5 * x / f64::from(i);
                }
                t
            })
            .sum()
    }

    #[test]
    fn j_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j_prime(0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j_prime(1, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn j0_first_zero_matches_bisection() {
        let z = oracle_zero(|x| raw_series(0, x), 2.0, 3.0);
        assert_abs_diff_eq!(z, 2.404825557695773, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j(0, 2.404825557695773).unwrap(), 0.0, epsilon = 1e-10);
        let z1 = oracle_zero(|x| raw_series(1, x), 3.0, 4.5);
        assert_abs_diff_eq!(z1, 3.831705970207512, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_j_prime(0, 3.8317059702075123).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn recurrence_matches_series_in_overlap() {
        // raw series is trustworthy to ~1e-13 for x <= 12
        for m in [0, 1, 2, 5, 9] {
            for &x in &[4.5, 7.0, 9.3, 11.9] {
                let a = j_sequence(m, x)[m as usize];
                assert_abs_diff_eq!(a, raw_series(m, x), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn y0_first_zero() {
        let z = oracle_zero(|x| bessel_y(0, x).unwrap(), 0.5, 1.5);
        assert_abs_diff_eq!(z, 0.8935769662791675, epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_y(0, 0.8935769662791675).unwrap(), 0.0, epsilon = 1e-8);
        assert!(bessel_y(0, 0.01).unwrap() < -2.0);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j(0, -1.0).is_err());
        assert!(bessel_j(MAX_ORDER + 1, 1.0).is_err());
        assert!(bessel_y(0, 0.0).is_err());
        assert!(bessel_y(3, -2.0).is_err());
        assert!(bessel_j(0, 2000.0).is_err());
        assert!(cross_product_zeros(0, 1.2, 1).is_err());
    }

    #[test]
    fn wronskian() {
        for m in 0..=20 {
            for &x in &[1.0, 5.0, 20.0, 80.0] {
                let w = bessel_j(m + 1, x).unwrap() * bessel_y(m, x).unwrap()
                    - bessel_j(m, x).unwrap() * bessel_y(m + 1, x).unwrap();
                assert_abs_diff_eq!(w, 2.0 / (PI * x), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn log_derivative_agrees_with_pair() {
        for m in [0u32, 1, 3, 12, 30] {
            for &x in &[0.1, 2.0, 13.7, 45.0] {
                let (j, dj) = j_and_prime(m, x);
                if j.abs() > 1e-30 {
                    let l = j_log_derivative(m, x);
                    assert!((l - x * dj / j).abs() <= 1e-9 * (1.0 + l.abs()), "m={m} x={x}");
                }
            }
        }
        // deep in the evanescent range J underflows but the ratio does not
        let l = j_log_derivative(150, 1e-3);
        assert!((l - 150.0).abs() < 1e-6);
    }

    #[test]
    fn zeros_first_entries() {
        assert_abs_diff_eq!(bessel_zeros(0, 1).unwrap()[0], 2.404825557695773, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_zeros(1, 1).unwrap()[0], 3.831705970207512, epsilon = 1e-12);
        let z = bessel_zeros(0, 40).unwrap();
        // McMahon: j_{0,s} ~ (s - 1/4) pi + 1/(8 (s - 1/4) pi)
        let beta = (40.0 - 0.25) * PI;
        assert_abs_diff_eq!(z[39], beta + 1.0 / (8.0 * beta), epsilon = 1e-6);
        let below = bessel_zeros_below(2, 20.0).unwrap();
        assert_eq!(below.len(), 5);
        assert!(below.iter().all(|&x| x <= 20.0));
    }

    #[test]
    fn zero_residuals_and_interlacing() {
        let table: Vec<Vec<f64>> = (0..=11).map(|m| bessel_zeros(m, 11).unwrap()).collect();
        for (m, zs) in table.iter().enumerate() {
            for &z in zs {
                assert!(bessel_j(m as u32, z).unwrap().abs() <= 1e-11);
            }
            assert!(zs.windows(2).all(|w| w[0] < w[1]));
        }
        for m in 0..=10 {
            for s in 0..10 {
                assert!(table[m][s] < table[m + 1][s]);
                assert!(table[m + 1][s] < table[m][s + 1]);
            }
        }
    }

    #[test]
    fn cross_product_first_zero() {
        // scan-and-bisect oracle on the raw (unnormalized) cross product
        let raw = |k: f64| {
            bessel_j(0, 0.5 * k).unwrap() * bessel_y(0, k).unwrap()
                - bessel_y(0, 0.5 * k).unwrap() * bessel_j(0, k).unwrap()
        };
        let guess = PI / 0.5;
        let mut k = 0.9 * guess;
        while (raw(k) > 0.0) == (raw(k + 0.01) > 0.0) {
            k += 0.01;
        }
        let oracle = oracle_zero(raw, k, k + 0.01);
        let z = cross_product_zeros(0, 0.5, 1).unwrap()[0];
        assert!(z > 0.9 * guess && z < 1.1 * guess);
        assert_abs_diff_eq!(z, oracle, epsilon = 1e-10);
        assert!(cross_product(0, 0.5, z).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn thinner_annulus_has_larger_zeros() {
        let wide = cross_product_zeros(0, 0.5, 3).unwrap();
        let thin = cross_product_zeros(0, 0.9, 3).unwrap();
        for (w, t) in wide.iter().zip(&thin) {
            assert!(t > w);
        }
        // and every annulus zero exceeds the disk zero of the same index
        let disk = bessel_zeros(0, 3).unwrap();
        for (w, d) in wide.iter().zip(&disk) {
            assert!(w > d);
        }
    }

    #[test]
    fn cross_product_residuals() {
        for m in [0, 1, 4, 12] {
            for &ratio in &[0.1, 0.3, 0.7] {
                for z in cross_product_zeros(m, ratio, 4).unwrap() {
                    assert!(cross_product(m, ratio, z).unwrap().abs() <= 1e-10);
                }
            }
        }
    }
}
