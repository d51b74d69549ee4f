//! Construction and numerical verification of p-harmonic functions with an
//! isolated boundary singularity.
//!
//! A function `u` is p-harmonic when `div(|Du|^{p-2} Du) = 0` in the weak
//! sense; for `p = N` (the space dimension) the equation is conformally
//! invariant and such functions are called N-harmonic.  This crate builds the
//! classical objects around that equation:
//!
//! * [`geometry`] — generalized Euler angles, signed distances, boundary
//!   projection and the reflection map through a `C^2` boundary.
//! * [`spectral`] — the exponent `beta_k` of two-dimensional separable
//!   p-harmonic functions `r^beta omega(theta)`, and the antiperiodic angular
//!   profile `omega_k` obtained by shooting on its second-order ODE.
//! * [`fields`] — point-evaluatable scalar fields with gradients: explicit
//!   singular kernels on balls, separable assemblies in every dimension,
//!   conformal inversion and odd reflection extension.
//! * [`verify`] — strong-form residuals, convergence orders, spherical
//!   spectral residuals, boundary asymptotics and the ellipticity of the
//!   reflected coefficients.
//! * [`solver`] — a 2D P1 finite-element Dirichlet solver for the p-Laplacian
//!   by damped-Newton energy minimization, and the epsilon-exhaustion
//!   construction of the fundamental singular solution on a disk.
//!
//! Everything is plain `f64`: the verification thresholds used throughout
//! (down to `1e-12`) only make sense in double precision.

pub mod fields;
pub mod geometry;
pub mod linalg;
pub mod sample;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use fields::{FieldError, FieldRef, ScalarField};
pub use geometry::{DomainGeometry, EulerPoint, GeometryError, Params, ReflectionData};
pub use spectral::{OmegaProfile, SpectralError, SpectralPair};

/// Crate version string embedded in CLI artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
