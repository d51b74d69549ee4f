//! The spectral exponent `beta_k`, its eigenvalue, and the antiperiodic
//! angular profile `omega_k`.
//!
//! Two-dimensional separable p-harmonic functions have the form
//! `u = r^beta omega(theta)` where `omega` solves the autonomous equation
//!
//! ```text
//! -((beta^2 w^2 + w'^2)^{(p-2)/2} w')' = lambda (beta^2 w^2 + w'^2)^{(p-2)/2} w,
//! lambda = beta (1 + (beta - 1)(p - 1)),
//! ```
//!
//! and `beta_k` is the root >= 1 of the quadratic
//! `(2k-1) X^2 - [(p k^2 + (p-2)(2k-1))/(p-1)] X + k^2 = 0`.
//!
//! Both routes to `beta_k` are implemented — the closed-form quadratic and a
//! shooting method on the ODE — and cross-validated against each other.
//!
//! The shooting target uses the first zero of `omega`: the equation is
//! autonomous and odd in `omega`, so if `omega(t*) = 0` then
//! `s |-> -omega(2 t* - s)` solves the same Cauchy problem at `t*`; by
//! uniqueness `omega(t* + s) = -omega(t* - s)`, i.e. the solution continues
//! antiperiodically and the first zero equals the least antiperiod.

mod ode;

pub use ode::{integrate, Rhs, Trajectory};

use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Default local tolerance for profile integration.
pub const INTEGRATION_TOL: f64 = 1e-10;
/// Bisection tolerance for zero location and exponent shooting.
pub const BISECTION_TOL: f64 = 1e-10;
/// Search horizon after which a missing zero is reported.
const ZERO_SEARCH_HORIZON: f64 = 4.0 * PI;
/// Exponent bracket growth cap for shooting.
const MAX_BRACKET: f64 = 64.0;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("integration failed at theta = {at}: {reason}")]
    IntegrationFailure { at: f64, reason: String },
    #[error("no zero of omega found before theta = {horizon}")]
    SearchFailure { horizon: f64 },
    #[error("shooting bracket grew past beta = {0} without a sign change")]
    BracketFailure(f64),
    #[error("phase-space state degenerate: beta^2 w^2 + (p-1) w'^2 < 1e-14")]
    DegenerateState,
    #[error(
        "first zero failed to decrease along the shooting path: theta*({beta_lo}) = {t_lo} vs theta*({beta_hi}) = {t_hi}"
    )]
    MonotonicityViolation { beta_lo: f64, t_lo: f64, beta_hi: f64, t_hi: f64 },
}

/// Tabulated antiperiodic profile `omega` on one antiperiod `[0, pi/k]`,
/// normalized by `omega(0) = 0`, `omega'(0) = 1`, extended everywhere by
/// `omega(theta + pi/k) = -omega(theta)`.
#[derive(Clone, Debug, Serialize)]
pub struct OmegaProfile {
    pub grid: Vec<f64>,
    pub omega: Vec<f64>,
    pub omega_prime: Vec<f64>,
    /// Second derivatives at the nodes (from the ODE), used to interpolate
    /// `omega'` with the same cubic-Hermite accuracy as `omega`.
    pub omega_second: Vec<f64>,
    pub antiperiod: f64,
}

/// One spectral mode: index, exponent, 2D eigenvalue and profile.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralPair {
    pub k: u32,
    pub p: f64,
    pub beta: f64,
    /// `beta (1 + (beta - 1)(p - 1))`, the eigenvalue of the 2D reduction.
    pub lambda2: f64,
    pub profile: OmegaProfile,
}

fn check_pk(p: f64, k: u32) -> Result<(), SpectralError> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(SpectralError::InvalidParam(format!("p must be > 1, got {p}")));
    }
    if k < 1 {
        return Err(SpectralError::InvalidParam("mode k must be >= 1".into()));
    }
    Ok(())
}

/// Coefficients `(a, b, c)` of the exponent quadratic `a X^2 + b X + c`.
fn exponent_quadratic(p: f64, k: u32) -> (f64, f64, f64) {
    let kf = k as f64;
    let a = 2.0 * kf - 1.0;
    let b = -(p * kf * kf + (p - 2.0) * (2.0 * kf - 1.0)) / (p - 1.0);
    let c = kf * kf;
    (a, b, c)
}

/// Residual of the exponent quadratic at `x`.
pub fn quadratic_residual(p: f64, k: u32, x: f64) -> f64 {
    let (a, b, c) = exponent_quadratic(p, k);
    (a * x * x + b * x + c).abs()
}

/// The exponent `beta_k`: root >= 1 of the quadratic, by the stable
/// quadratic formula.  The discriminant is nonnegative for all `p > 1`,
/// `k >= 1` (the quadratic is <= 0 at X = 1); it is clamped at zero if
/// rounding drives it slightly negative.
pub fn beta_closed_form(p: f64, k: u32) -> Result<f64, SpectralError> {
    check_pk(p, k)?;
    let (a, b, c) = exponent_quadratic(p, k);
    let disc = (b * b - 4.0 * a * c).max(0.0);
    // b < 0 here, so q = -(b - sqrt(disc))/2 avoids cancellation.
    let q = (-b + disc.sqrt()) / 2.0;
    let root_big = q / a;
    let root_small = c / q;
    Ok(root_big.max(root_small))
}

/// Eigenvalue `lambda_{N,beta} = beta (N - 1 + (beta - 1)(p - 1))` of the
/// spherical spectral problem.
pub fn lambda_eig(n: usize, beta: f64, p: f64) -> f64 {
    assert!(n >= 2, "dimension must be >= 2");
    beta * ((n - 1) as f64 + (beta - 1.0) * (p - 1.0))
}

/// Second derivative `omega''` from the expanded form of the profile ODE:
///
/// ```text
/// w'' = -w [lambda (beta^2 w^2 + w'^2) + (p-2) beta^2 w'^2]
///          / [beta^2 w^2 + (p-1) w'^2]
/// ```
///
/// This expansion is degree-1 homogeneous in `(w, w')` and carries no
/// fractional power, so it stays regular for p < 2 away from the phase-space
/// origin.
pub fn ode_rhs(p: f64, beta: f64, omega: f64, omega_prime: f64) -> Result<f64, SpectralError> {
    let lambda = lambda_eig(2, beta, p);
    let q = beta * beta * omega * omega + omega_prime * omega_prime;
    let denom = beta * beta * omega * omega + (p - 1.0) * omega_prime * omega_prime;
    if denom < 1e-14 {
        return Err(SpectralError::DegenerateState);
    }
    Ok(-omega * (lambda * q + (p - 2.0) * beta * beta * omega_prime * omega_prime) / denom)
}

fn profile_rhs(p: f64, beta: f64) -> impl Fn(f64, [f64; 2]) -> Result<[f64; 2], SpectralError> {
    move |_t, y| Ok([y[1], ode_rhs(p, beta, y[0], y[1])?])
}

/// Integrate the profile ODE from arbitrary initial data.
pub fn integrate_omega_from(
    p: f64,
    beta: f64,
    y0: (f64, f64),
    theta_max: f64,
    tol: f64,
) -> Result<Trajectory, SpectralError> {
    ode::integrate(&profile_rhs(p, beta), 0.0, [y0.0, y0.1], theta_max, tol, None)
}

/// Integrate the canonical profile (`omega(0) = 0`, `omega'(0) = 1`) up to
/// `theta_max` with dense output.
pub fn integrate_omega(
    p: f64,
    beta: f64,
    theta_max: f64,
    tol: f64,
) -> Result<Trajectory, SpectralError> {
    if beta < 1.0 {
        return Err(SpectralError::InvalidParam(format!("beta must be >= 1, got {beta}")));
    }
    integrate_omega_from(p, beta, (0.0, 1.0), theta_max, tol)
}

/// First `theta > 0` with `omega(theta) = 0` for the canonical profile; by
/// the odd-reflection symmetry of the autonomous equation this equals the
/// least antiperiod.
pub fn first_zero(p: f64, beta: f64) -> Result<f64, SpectralError> {
    if beta < 1.0 {
        return Err(SpectralError::InvalidParam(format!("beta must be >= 1, got {beta}")));
    }
    let tr = ode::integrate(
        &profile_rhs(p, beta),
        0.0,
        [0.0, 1.0],
        ZERO_SEARCH_HORIZON,
        INTEGRATION_TOL,
        Some(&|t: f64, y: [f64; 2]| t > 1e-6 && y[0] <= 0.0),
    )?;
    // Find the bracketing accepted nodes.
    let mut bracket = None;
    for w in 1..tr.ts.len() {
        if tr.ys[w][0] <= 0.0 {
            bracket = Some((tr.ts[w - 1], tr.ts[w]));
            break;
        }
    }
    let (mut lo, mut hi) = bracket.ok_or(SpectralError::SearchFailure { horizon: ZERO_SEARCH_HORIZON })?;
    // Bisection on the dense output.
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if tr.eval(mid)[0] > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solve `first_zero(p, beta) = pi/k` for `beta` by bisection, growing the
/// upper bracket geometrically.  The observed map `beta -> theta*` must be
/// decreasing along the path; a violation beyond integration noise aborts.
pub fn beta_by_shooting(p: f64, k: u32) -> Result<f64, SpectralError> {
    check_pk(p, k)?;
    let target = PI / k as f64;
    let mut evals: Vec<(f64, f64)> = Vec::new();
    let eval = |beta: f64, evals: &mut Vec<(f64, f64)>| -> Result<f64, SpectralError> {
        let t = first_zero(p, beta)?;
        evals.push((beta, t));
        Ok(t)
    };

    let t1 = eval(1.0, &mut evals)?;
    if (t1 - target).abs() <= 1e-8 {
        return Ok(1.0);
    }
    if t1 < target {
        // theta* is decreasing in beta, so no beta >= 1 can reach a larger
        // antiperiod; only k = 1 targets pi and that case returned above.
        return Err(SpectralError::SearchFailure { horizon: ZERO_SEARCH_HORIZON });
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    loop {
        if hi > MAX_BRACKET {
            return Err(SpectralError::BracketFailure(MAX_BRACKET));
        }
        let t = eval(hi, &mut evals)?;
        if t < target {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let t = eval(mid, &mut evals)?;
        if t > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Runtime check of the monotonicity assumption used by the bisection;
    // 1e-9 slack absorbs integration noise between nearby beta values.
    evals.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in evals.windows(2) {
        let ((b0, t0), (b1, t1)) = (w[0], w[1]);
        if t1 > t0 + 1e-9 {
            return Err(SpectralError::MonotonicityViolation {
                beta_lo: b0,
                t_lo: t0,
                beta_hi: b1,
                t_hi: t1,
            });
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Build the canonical profile of mode `k` on `m + 1` uniform nodes of one
/// antiperiod, with `beta` from the closed form.
///
/// The integration restarts at every node so the stored values are direct
/// integrator outputs rather than dense-output samples; the interpolation
/// error of the finished table is then the plain cubic-Hermite one,
/// `O((antiperiod/m)^4)` in value and `O((antiperiod/m)^2)` in curvature.
pub fn tabulate(p: f64, k: u32, m: usize) -> Result<SpectralPair, SpectralError> {
    check_pk(p, k)?;
    if m < 64 {
        return Err(SpectralError::InvalidParam(format!("resolution m must be >= 64, got {m}")));
    }
    let beta = beta_closed_form(p, k)?;
    let antiperiod = PI / k as f64;
    let rhs = profile_rhs(p, beta);
    let mut grid = Vec::with_capacity(m + 1);
    let mut omega = Vec::with_capacity(m + 1);
    let mut omega_prime = Vec::with_capacity(m + 1);
    let mut omega_second = Vec::with_capacity(m + 1);
    let mut y = [0.0, 1.0];
    grid.push(0.0);
    omega.push(y[0]);
    omega_prime.push(y[1]);
    omega_second.push(ode_rhs(p, beta, y[0], y[1])?);
    for i in 1..=m {
        let t0 = antiperiod * (i - 1) as f64 / m as f64;
        let t1 = antiperiod * i as f64 / m as f64;
        let tr = ode::integrate(&rhs, t0, y, t1, 1e-12, None)?;
        y = *tr.ys.last().unwrap();
        grid.push(t1);
        omega.push(y[0]);
        omega_prime.push(y[1]);
        omega_second.push(ode_rhs(p, beta, y[0], y[1])?);
    }
    let profile = OmegaProfile { grid, omega, omega_prime, omega_second, antiperiod };
    Ok(SpectralPair { k, p, beta, lambda2: lambda_eig(2, beta, p), profile })
}

impl OmegaProfile {
    /// `(omega, omega')` at any angle, using the antiperiodic extension and
    /// cubic-Hermite interpolation on the stored antiperiod.
    pub fn eval(&self, theta: f64) -> (f64, f64) {
        let t = self.antiperiod;
        let mut q = theta.rem_euclid(2.0 * t);
        let mut sign = 1.0;
        if q >= t {
            q -= t;
            sign = -1.0;
        }
        let (w, wp) = self.eval_base(q);
        (sign * w, sign * wp)
    }

    /// Interpolation on the base interval `[0, antiperiod]`.
    fn eval_base(&self, theta: f64) -> (f64, f64) {
        let m = self.grid.len() - 1;
        let dt = self.antiperiod / m as f64;
        let i = ((theta / dt) as usize).min(m - 1);
        let s = (theta - self.grid[i]) / dt;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let w = h00 * self.omega[i]
            + h10 * dt * self.omega_prime[i]
            + h01 * self.omega[i + 1]
            + h11 * dt * self.omega_prime[i + 1];
        let wp = h00 * self.omega_prime[i]
            + h10 * dt * self.omega_second[i]
            + h01 * self.omega_prime[i + 1]
            + h11 * dt * self.omega_second[i + 1];
        (w, wp)
    }

    /// Largest |omega| over the stored nodes.
    pub fn sup_abs(&self) -> f64 {
        self.omega.iter().fold(0.0, |m, w| m.max(w.abs()))
    }
}

impl SpectralPair {
    /// Residual of the exponent quadratic at the stored `beta`.
    pub fn beta_residual(&self) -> f64 {
        quadratic_residual(self.p, self.k, self.beta)
    }

    /// |omega| at the antiperiod (would be exactly 0 for the ideal exponent).
    pub fn antiperiod_residual(&self) -> f64 {
        self.profile.omega.last().unwrap().abs()
    }
}
