//! Generalized Euler angles in `R^N`.
//!
//! The chart used throughout the crate is
//!
//! ```text
//! x_1     = r sin(theta_{N-1}) sin(theta_{N-2}) ... sin(theta_2) sin(theta_1)
//! x_2     = r sin(theta_{N-1}) sin(theta_{N-2}) ... sin(theta_2) cos(theta_1)
//! ...
//! x_{N-1} = r sin(theta_{N-1}) cos(theta_{N-2})
//! x_N     = r cos(theta_{N-1})
//! ```
//!
//! with `theta_1 in [0, 2pi)` and `theta_j in [0, pi]` for `j >= 2`.  The
//! product `r sin(theta_{N-1}) ... sin(theta_2)` is the cylindrical radius
//! `sqrt(x_1^2 + x_2^2)` of the first coordinate plane.

use super::GeometryError;
use std::f64::consts::TAU;

/// A point in generalized Euler angles: radius plus `N-1` angles
/// `theta[0] = theta_1, ..., theta[N-2] = theta_{N-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerPoint {
    pub r: f64,
    pub theta: Vec<f64>,
    /// Set when the point sits on a chart degeneracy (some `sin theta_j = 0`
    /// with `j >= 2`, or `r = 0`); the affected angles are reported as 0.
    pub degenerate: bool,
}

/// Recover `(r, theta_1, ..., theta_{N-1})` from cartesian coordinates.
///
/// Angles at degenerate chart points are set to 0 and the point is flagged;
/// the zero vector yields `r = 0` with all angles 0.
pub fn to_euler(x: &[f64], n: usize) -> Result<EulerPoint, GeometryError> {
    if n < 2 {
        return Err(GeometryError::InvalidDimension(n));
    }
    if x.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, got: x.len() });
    }
    // Partial norms rho_j = |(x_1, ..., x_j)|, computed once.
    let mut partial = vec![0.0; n + 1];
    let mut acc = 0.0;
    for (j, &xi) in x.iter().enumerate() {
        acc += xi * xi;
        partial[j + 1] = acc.sqrt();
    }
    let r = partial[n];
    let mut theta = vec![0.0; n - 1];
    let mut degenerate = r == 0.0;
    // theta_j = atan2(rho_j, x_{j+1}) for j = N-1 .. 2 is stable near both
    // poles, unlike acos of a quotient.
    for j in (2..=n - 1).rev() {
        if partial[j + 1] == 0.0 {
            degenerate = true;
            theta[j - 1] = 0.0;
        } else {
            theta[j - 1] = partial[j].atan2(x[j]);
            if partial[j] == 0.0 {
                degenerate = true;
            }
        }
    }
    if partial[2] == 0.0 {
        degenerate = true;
        theta[0] = 0.0;
    } else {
        let mut t = x[0].atan2(x[1]);
        if t < 0.0 {
            t += TAU;
        }
        theta[0] = t;
    }
    Ok(EulerPoint { r, theta, degenerate })
}

/// Evaluate the Euler chart: angles and radius back to cartesian coordinates.
pub fn from_euler(e: &EulerPoint, n: usize) -> Result<Vec<f64>, GeometryError> {
    if n < 2 {
        return Err(GeometryError::InvalidDimension(n));
    }
    if e.theta.len() != n - 1 {
        return Err(GeometryError::DimensionMismatch { expected: n - 1, got: e.theta.len() });
    }
    let mut x = vec![0.0; n];
    let mut prod = e.r;
    for j in (1..n - 1).rev() {
        let t = e.theta[j];
        x[j + 1] = prod * t.cos();
        prod *= t.sin();
    }
    let t1 = e.theta[0];
    x[1] = prod * t1.cos();
    x[0] = prod * t1.sin();
    Ok(x)
}

/// Cylindrical radius `r sin(theta_{N-1}) ... sin(theta_2)` of an Euler point,
/// i.e. `sqrt(x_1^2 + x_2^2)`.
pub fn sine_product_radius(e: &EulerPoint) -> f64 {
    let mut prod = e.r;
    for &t in e.theta.iter().skip(1) {
        prod *= t.sin();
    }
    prod
}
