//! Boundary principal-symbol analysis for a general symmetric positive
//! matrix `A(x0)` at a boundary point with outward normal `nu`.
//!
//! In the local frame `y = C (x - x0)` with the last axis along `nu`, the
//! two Dirichlet-to-Neumann maps have principal symbols
//!
//! ```text
//! p   = |tau|
//! p_A = sqrt( a_dd * sum_{i,j<d} a_ij tau_i tau_j - (sum_{i<d} a_id tau_i)^2 )
//! ```
//!
//! so `p_A^2 - p^2 = tau^T M tau` with the `(d-1) x (d-1)` gap matrix
//! `M = a_dd * A_tt - a_t a_t^T - I`. Ellipticity of the transmission
//! problem is definiteness of `M`; for `d = 2` it reduces to `det A != 1`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::media::{Media, RadialDomain};

/// Relative margin for the open (`!=`) conditions.
pub const SYMBOL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolError {
    #[error("dimension {0} is not supported (expected 2 or 3)")]
    Dimension(usize),
    #[error("matrix is {rows}x{cols}, normal has {len} entries")]
    Shape { rows: usize, cols: usize, len: usize },
    #[error("matrix is not symmetric (asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:.6e})")]
    NotPositive(f64),
    #[error("normal vector has length {0}, expected 1")]
    NotUnit(f64),
    #[error("refraction index {0} must be positive")]
    Index(f64),
    #[error("tangent covector must have {expected} nonzero entries")]
    Tangent { expected: usize },
    #[error("degenerate symbol: radicand {0:.6e} is not positive")]
    Degenerate(f64),
}

/// `A(x0)`, `nu(x0)`, `n(x0)` at one boundary point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySample {
    a0: DMatrix<f64>,
    nu: DVector<f64>,
    n0: f64,
}

impl BoundarySample {
    pub fn new(a0: DMatrix<f64>, nu: DVector<f64>, n0: f64) -> Result<Self, SymbolError> {
        let d = a0.nrows();
        if d != 2 && d != 3 {
            return Err(SymbolError::Dimension(d));
        }
        if a0.ncols() != d || nu.len() != d {
            return Err(SymbolError::Shape { rows: d, cols: a0.ncols(), len: nu.len() });
        }
        let scale = a0.amax().max(1.0);
        let asym = (&a0 - a0.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(SymbolError::NotSymmetric(asym));
        }
        let smallest = a0.clone().symmetric_eigenvalues().min();
        if smallest.is_nan() || smallest <= 0.0 {
            return Err(SymbolError::NotPositive(smallest));
        }
        let len = nu.norm();
        if (len - 1.0).abs() > 1e-9 {
            return Err(SymbolError::NotUnit(len));
        }
        if !(n0.is_finite() && n0 > 0.0) {
            return Err(SymbolError::Index(n0));
        }
        Ok(Self { a0, nu, n0 })
    }

    /// `A = a I` with normal along the last axis.
    pub fn isotropic(a: f64, n0: f64, d: usize) -> Result<Self, SymbolError> {
        if d != 2 && d != 3 {
            return Err(SymbolError::Dimension(d));
        }
        let mut nu = DVector::zeros(d);
        nu[d - 1] = 1.0;
        Self::new(DMatrix::identity(d, d) * a, nu, n0)
    }

    pub fn dim(&self) -> usize {
        self.a0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a0
    }

    pub fn normal(&self) -> &DVector<f64> {
        &self.nu
    }

    pub fn index(&self) -> f64 {
        self.n0
    }
}

/// Orthonormal frame with the normal as its last row, and `A` in that frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFrame {
    pub transfer: DMatrix<f64>,
    pub a_tilde: DMatrix<f64>,
}

impl LocalFrame {
    pub fn dim(&self) -> usize {
        self.transfer.nrows()
    }

    /// Re-express a sample's matrix in a caller-supplied orthogonal frame.
    pub fn with_transfer(sample: &BoundarySample, transfer: DMatrix<f64>) -> Self {
        let a_tilde = &transfer * sample.matrix() * transfer.transpose();
        Self { transfer, a_tilde }
    }

    /// `M = a_dd A_tt - a_t a_t^T - I`, the quadratic form of `p_A^2 - p^2`.
    pub fn gap_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let t = d - 1;
        let add = self.a_tilde[(t, t)];
        DMatrix::from_fn(t, t, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            add * self.a_tilde[(i, j)] - self.a_tilde[(i, t)] * self.a_tilde[(j, t)] - delta
        })
    }
}

/// Gram-Schmidt completion of `nu` from the standard basis, skipping the
/// axis most parallel to `nu`.
pub fn build_frame(sample: &BoundarySample) -> LocalFrame {
    let d = sample.dim();
    let nu = sample.normal();
    let skip = nu.iamax();
    let mut rows: Vec<DVector<f64>> = Vec::with_capacity(d);
    for axis in (0..d).filter(|&i| i != skip) {
        let mut v = DVector::zeros(d);
        v[axis] = 1.0;
        v -= nu * nu.dot(&v);
        for r in &rows {
            let proj = r.dot(&v);
            v -= r * proj;
        }
        rows.push(v.normalize());
    }
    rows.push(nu.clone());
    let transfer = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
    LocalFrame::with_transfer(sample, transfer)
}

/// `(p, p_A)` at a nonzero tangent covector `tau` (length `d - 1`).
pub fn principal_symbols(frame: &LocalFrame, tau: &[f64]) -> Result<(f64, f64), SymbolError> {
    let t = frame.dim() - 1;
    if tau.len() != t || tau.iter().all(|&x| x == 0.0) {
        return Err(SymbolError::Tangent { expected: t });
    }
    let a = &frame.a_tilde;
    let mut quad = 0.0;
    let mut mixed = 0.0;
    for i in 0..t {
        mixed += a[(i, t)] * tau[i];
        for j in 0..t {
            quad += a[(i, j)] * tau[i] * tau[j];
        }
    }
    let radicand = a[(t, t)] * quad - mixed * mixed;
    if radicand.is_nan() || radicand <= 0.0 {
        return Err(SymbolError::Degenerate(radicand));
    }
    let p = tau.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((p, radicand.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticityVerdict {
    pub elliptic: bool,
    /// `sgn(p - p_A)`, present iff elliptic.
    pub sigma: Option<i8>,
    /// `a_dd n(x0) != 1`.
    pub discrete_ok: bool,
    /// `det M` (equals `det A - 1` for `d = 2`).
    pub gap_det: f64,
}

pub fn check_ellipticity(sample: &BoundarySample) -> EllipticityVerdict {
    verdict_in_frame(&build_frame(sample), sample.index())
}

pub(crate) fn verdict_in_frame(frame: &LocalFrame, n0: f64) -> EllipticityVerdict {
    let gap = frame.gap_matrix();
    let d = frame.dim();
    let (elliptic, sigma, gap_det) = if d == 2 {
        let det_a = frame.a_tilde.determinant();
        let g = gap[(0, 0)];
        let elliptic = (det_a - 1.0).abs() > SYMBOL_TOL * det_a.abs().max(1.0);
        let sigma = if 1.0 - det_a > 0.0 { 1 } else { -1 };
        (elliptic, sigma, g)
    } else {
        let det = gap.determinant();
        let scale = gap.amax().max(1.0);
        let elliptic = det > SYMBOL_TOL * scale * scale;
        let trace = gap.trace();
        if elliptic {
            // a symmetric 2x2 matrix with positive determinant is definite
            debug_assert!(gap[(0, 0)] * gap[(1, 1)] > 0.0 && trace != 0.0);
        }
        // negative-definite M: p_A < p
        let sigma = if trace < 0.0 { 1 } else { -1 };
        (elliptic, sigma, det)
    };
    let t = d - 1;
    let an = frame.a_tilde[(t, t)] * n0;
    EllipticityVerdict {
        elliptic,
        sigma: elliptic.then_some(sigma),
        discrete_ok: (an - 1.0).abs() > SYMBOL_TOL * an.max(1.0),
        gap_det,
    }
}

/// `sgn(p - p_A)` sampled over `count` unit tangent directions; `None` when
/// the sign is not constant (or the symbols coincide somewhere).
pub fn sampled_sigma(frame: &LocalFrame, count: usize) -> Option<i8> {
    let dirs: Vec<Vec<f64>> = if frame.dim() == 2 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        (0..count)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect()
    };
    let mut sign = None;
    for tau in &dirs {
        let (p, pa) = principal_symbols(frame, tau).ok()?;
        let diff = p - pa;
        if diff.abs() <= SYMBOL_TOL * p.max(pa) {
            return None;
        }
        let s = if diff > 0.0 { 1 } else { -1 };
        match sign {
            None => sign = Some(s),
            Some(prev) if prev != s => return None,
            _ => {}
        }
    }
    sign
}

/// Which sufficient condition for a discrete transmission spectrum to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscretenessRoute {
    /// `a_dd n(x0) != 1` at every boundary point.
    Boundary,
    /// `integral_O n != 1`; only available without an obstacle and with
    /// `A - I` sign-definite, otherwise falls back to [`Self::Boundary`].
    Integral,
}

/// Discreteness condition for constant media on a radial domain.
pub fn check_discreteness_global(media: &Media, domain: &RadialDomain, route: DiscretenessRoute) -> bool {
    let integral_ok = !domain.has_obstacle() && (media.a() - 1.0).abs() > SYMBOL_TOL;
    match route {
        DiscretenessRoute::Integral if integral_ok => {
            let mass = media.n() * domain.volume(media.d()).0;
            (mass - 1.0).abs() > SYMBOL_TOL * mass.max(1.0)
        }
        _ => {
            let an = media.a() * media.n();
            (an - 1.0).abs() > SYMBOL_TOL * an.max(1.0)
        }
    }
}
