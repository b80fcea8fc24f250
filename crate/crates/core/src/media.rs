//! Scatterer configuration: constant isotropic medium `A = a I`, refraction
//! index `n`, and a disk (or ball) of radius `R` with an optional concentric
//! obstacle of radius `r0`.

use std::f64::consts::PI;

use thiserror::Error;

/// Relative margin for the `a != 1` and `a n != 1` guards.
pub const GUARD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MediaError {
    #[error("anisotropy coefficient a = {0} must be positive and finite")]
    Anisotropy(f64),
    #[error("refraction index n = {0} must be positive and finite")]
    Index(f64),
    #[error("dimension d = {0} is not supported (expected 2 or 3)")]
    Dimension(u32),
    #[error("outer radius R = {0} must be positive and finite")]
    Radius(f64),
    #[error("obstacle radius r0 = {r0} must satisfy 0 <= r0 < R = {radius}")]
    Obstacle { r0: f64, radius: f64 },
    #[error("a = {0} is within the guard margin of 1: both equations share a principal symbol")]
    UnitAnisotropy(f64),
    #[error("a n = {0} is within the guard margin of 1")]
    UnitProduct(f64),
}

/// Constant medium `A = a I`, index `n`, spatial dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Media {
    a: f64,
    n: f64,
    d: u32,
}

impl Media {
    /// Validates positivity and the dimension. The `a != 1`, `a n != 1`
    /// guards are checked separately by [`Media::check_guards`] so that gate
    /// failures can be reported as such.
    pub fn new(a: f64, n: f64, d: u32) -> Result<Self, MediaError> {
        if !(a.is_finite() && a > 0.0) {
            return Err(MediaError::Anisotropy(a));
        }
        if !(n.is_finite() && n > 0.0) {
            return Err(MediaError::Index(n));
        }
        if d != 2 && d != 3 {
            return Err(MediaError::Dimension(d));
        }
        Ok(Self { a, n, d })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Ratio `n / a`: `lambda_i^A = (a/n) lambda_i` without an obstacle.
    pub fn index_ratio(&self) -> f64 {
        self.n / self.a
    }

    pub fn check_guards(&self) -> Result<(), MediaError> {
        if (self.a - 1.0).abs() < GUARD_TOL {
            return Err(MediaError::UnitAnisotropy(self.a));
        }
        let an = self.a * self.n;
        if (an - 1.0).abs() < GUARD_TOL {
            return Err(MediaError::UnitProduct(an));
        }
        Ok(())
    }
}

/// Disk/ball `|x| < R` containing the concentric obstacle `|x| <= r0`
/// (`r0 = 0` means no obstacle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDomain {
    radius: f64,
    obstacle: f64,
}

impl RadialDomain {
    pub fn new(radius: f64, obstacle: f64) -> Result<Self, MediaError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(MediaError::Radius(radius));
        }
        if !(obstacle.is_finite() && obstacle >= 0.0 && obstacle < radius) {
            return Err(MediaError::Obstacle { r0: obstacle, radius });
        }
        Ok(Self { radius, obstacle })
    }

    pub fn disk(radius: f64) -> Result<Self, MediaError> {
        Self::new(radius, 0.0)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn obstacle(&self) -> f64 {
        self.obstacle
    }

    pub fn has_obstacle(&self) -> bool {
        self.obstacle > 0.0
    }

    /// `r0 / R`.
    pub fn ratio(&self) -> f64 {
        self.obstacle / self.radius
    }

    /// `(Vol(O), Vol(O \ V))` in dimension `d`.
    pub fn volume(&self, d: u32) -> (f64, f64) {
        let w = WeylConstants::new(d).omega;
        let di = d as i32;
        let outer = w * self.radius.powi(di);
        (outer, outer - w * self.obstacle.powi(di))
    }
}

/// Volume `omega_d` of the unit ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylConstants {
    pub d: u32,
    pub omega: f64,
}

impl WeylConstants {
    /// Only `d = 2, 3` are meaningful here; other values fall back to the
    /// general Gamma-function formula for completeness.
    pub fn new(d: u32) -> Self {
        let omega = match d {
            1 => 2.0,
            2 => PI,
            3 => 4.0 * PI / 3.0,
            _ => {
                // omega_d = omega_{d-2} * 2 pi / d
                let mut w = if d.is_multiple_of(2) { 1.0 } else { 2.0 };
                let mut k = if d.is_multiple_of(2) { 2 } else { 3 };
                while k <= d {
                    w *= 2.0 * PI / f64::from(k);
                    k += 2;
                }
                w
            }
        };
        Self { d, omega }
    }

    /// Weyl coefficient `omega_d / (2 pi)^d`.
    pub fn weyl_coefficient(&self) -> f64 {
        self.omega / (2.0 * PI).powi(self.d as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn volumes() {
        let disk = RadialDomain::disk(1.0).unwrap();
        assert_eq!(disk.volume(2), (PI, PI));
        let (o, ov) = RadialDomain::new(1.0, 0.3).unwrap().volume(2);
        assert_relative_eq!(o, PI);
        assert_relative_eq!(ov, 0.91 * PI, max_relative = 1e-15);
        let (b, bv) = disk.volume(3);
        assert_relative_eq!(b, 4.0 * PI / 3.0);
        assert_relative_eq!(bv, 4.0 * PI / 3.0);
    }

    #[test]
    fn unit_ball_volumes() {
        assert_relative_eq!(WeylConstants::new(4).omega, PI * PI / 2.0, max_relative = 1e-14);
        assert_relative_eq!(WeylConstants::new(5).omega, 8.0 * PI * PI / 15.0, max_relative = 1e-14);
        assert_relative_eq!(WeylConstants::new(2).weyl_coefficient(), 1.0 / (4.0 * PI));
    }

    #[test]
    fn validation() {
        assert!(Media::new(0.0, 1.0, 2).is_err());
        assert!(Media::new(1.0, -1.0, 2).is_err());
        assert!(Media::new(0.5, 0.25, 4).is_err());
        assert!(RadialDomain::new(1.0, 1.0).is_err());
        assert!(RadialDomain::new(1.0, -0.1).is_err());
        assert!(RadialDomain::new(0.0, 0.0).is_err());
        assert_eq!(
            Media::new(1.0, 0.3, 2).unwrap().check_guards(),
            Err(MediaError::UnitAnisotropy(1.0))
        );
        assert!(matches!(
            Media::new(2.0, 0.5, 2).unwrap().check_guards(),
            Err(MediaError::UnitProduct(_))
        ));
        assert!(Media::new(0.5, 0.25, 2).unwrap().check_guards().is_ok());
    }

    proptest! {
        #[test]
        fn volume_monotonicity(r in 0.1f64..5.0, f1 in 0.0f64..0.99, f2 in 0.0f64..0.99, d in 2u32..=3) {
            let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
            let a = RadialDomain::new(r, lo * r).unwrap().volume(d);
            let b = RadialDomain::new(r, hi * r).unwrap().volume(d);
            prop_assert!(a.1 <= a.0);
            prop_assert_eq!(a.1 == a.0, lo == 0.0);
            if hi > lo {
                prop_assert!(b.1 < a.1);
            }
            let bigger = RadialDomain::new(1.5 * r, lo * r).unwrap().volume(d);
            prop_assert!(bigger.0 > a.0 && bigger.1 > a.1);
        }
    }
}
