//! Coordinate systems, canonical domains, signed distance and the reflection
//! map through the boundary.
//!
//! Sign convention: the signed distance `rho(x)` is negative strictly inside
//! the domain, zero on the boundary and positive outside.  With `xi_x` the
//! boundary projection of a tube point `x`, the reflection through the
//! boundary is `psi(x) = 2 xi_x - x`, the mirror image of `x` on the normal
//! line through `xi_x`.  `psi` is an involution of the tubular neighborhood
//! `|rho| <= beta0` and fixes the boundary pointwise; its Jacobian at a
//! boundary point is the orthogonal reflection `I - 2 nu nu^T` across the
//! tangent plane (which is what makes odd extensions of boundary-vanishing
//! solutions C^1 across the boundary).

mod domain;
mod euler;

pub use domain::{DomainGeometry, ReflectionData, CORNER_CAP_RADIUS};
pub use euler::{from_euler, sine_product_radius, to_euler, EulerPoint};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The exponent/dimension pair governing every equation in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    p: f64,
    n: usize,
}

impl Params {
    pub fn new(p: f64, n: usize) -> Result<Self, GeometryError> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(GeometryError::InvalidExponent(p));
        }
        if n < 2 {
            return Err(GeometryError::InvalidDimension(n));
        }
        Ok(Self { p, n })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True in the conformally invariant case `p = N`.
    pub fn is_conformal(&self) -> bool {
        (self.p - self.n as f64).abs() < 1e-14
    }
}

#[cfg(test)]
mod params_tests {
    use super::Params;

    #[test]
    fn validation() {
        assert!(Params::new(1.0, 2).is_err());
        assert!(Params::new(f64::NAN, 2).is_err());
        assert!(Params::new(2.0, 1).is_err());
        let p = Params::new(3.0, 3).unwrap();
        assert!(p.is_conformal());
        assert!(!Params::new(2.5, 3).unwrap().is_conformal());
        assert_eq!((p.p(), p.n()), (3.0, 3));
    }
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("exponent p must satisfy p > 1, got {0}")]
    InvalidExponent(f64),
    #[error("dimension must be >= 2, got {0}")]
    InvalidDimension(usize),
    #[error("point has dimension {got}, geometry expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point at signed distance {rho} outside the tubular neighborhood |rho| <= {beta0}")]
    OutOfTube { rho: f64, beta0: f64 },
    #[error("projection falls within {radius} of a boundary corner; reflection undefined there")]
    CornerCap { radius: f64 },
    #[error("operation not supported for this geometry kind")]
    Unsupported,
}
