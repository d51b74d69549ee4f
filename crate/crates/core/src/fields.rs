//! Point-evaluatable scalar fields with gradients.
//!
//! A [`ScalarField`] maps a cartesian point to a value and carries an
//! analytic gradient wherever a closed form exists; the finite-difference
//! gradient [`fd_gradient`] is exposed separately so tests can cross the two
//! paths.  Fields record their singular points so verification sweeps can
//! exclude neighborhoods around them.
//!
//! Constructors cover the explicit singular solutions on balls, the
//! separable families built from a [`SpectralPair`], conformal inversion and
//! odd reflection extension through a domain boundary.

use crate::geometry::{self, DomainGeometry, GeometryError};
use crate::linalg;
use crate::spectral::{self, SpectralError, SpectralPair};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

pub type FieldRef = Arc<dyn ScalarField>;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("evaluation at singular point {point:?}")]
    SingularPoint { point: Vec<f64> },
    #[error("point outside the field's domain: {reason}")]
    OutOfDomain { reason: String },
    #[error("point has dimension {got}, field expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid field construction: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> Result<f64, FieldError>;
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError>;
    /// Isolated points where the field blows up or is undefined.
    fn singular_points(&self) -> Vec<Vec<f64>> {
        Vec::new()
    }
    fn description(&self) -> String;
}

fn check_dim(field: &dyn ScalarField, x: &[f64]) -> Result<(), FieldError> {
    if x.len() != field.dim() {
        return Err(FieldError::DimensionMismatch { expected: field.dim(), got: x.len() });
    }
    Ok(())
}

/// Central-difference gradient of the value evaluator; the independent
/// cross-check for analytic gradients.
pub fn fd_gradient(u: &dyn ScalarField, x: &[f64], h: f64) -> Result<Vec<f64>, FieldError> {
    let mut g = vec![0.0; x.len()];
    for j in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        g[j] = (u.value(&xp)? - u.value(&xm)?) / (2.0 * h);
    }
    Ok(g)
}

// --- coordinate and inverted-coordinate fields ----------------------------

struct CoordinateField {
    axis: usize, // zero-based
    n: usize,
}

impl ScalarField for CoordinateField {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        check_dim(self, x)?;
        Ok(x[self.axis])
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        check_dim(self, x)?;
        let mut g = vec![0.0; self.n];
        g[self.axis] = 1.0;
        Ok(g)
    }
    fn description(&self) -> String {
        format!("coordinate x_{} in R^{}", self.axis + 1, self.n)
    }
}

/// The coordinate function `u(x) = x_i` (`i` is 1-based); p-harmonic for
/// every `p`.
pub fn coordinate_field(i: usize, n: usize, _p: f64) -> Result<FieldRef, FieldError> {
    if i < 1 || i > n {
        return Err(FieldError::Invalid(format!("axis {i} out of range 1..={n}")));
    }
    Ok(Arc::new(CoordinateField { axis: i - 1, n }))
}

struct ChiField {
    axis: usize,
    n: usize,
}

impl ScalarField for ChiField {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        check_dim(self, x)?;
        let r2 = linalg::dot(x, x);
        if r2 == 0.0 {
            return Err(FieldError::SingularPoint { point: vec![0.0; self.n] });
        }
        Ok(x[self.axis] / r2)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        check_dim(self, x)?;
        let r2 = linalg::dot(x, x);
        if r2 == 0.0 {
            return Err(FieldError::SingularPoint { point: vec![0.0; self.n] });
        }
        let mut g = linalg::scale(x, -2.0 * x[self.axis] / (r2 * r2));
        g[self.axis] += 1.0 / r2;
        Ok(g)
    }
    fn singular_points(&self) -> Vec<Vec<f64>> {
        vec![vec![0.0; self.n]]
    }
    fn description(&self) -> String {
        format!("chi_{}(x) = x_{} / |x|^2 in R^{}", self.axis + 1, self.axis + 1, self.n)
    }
}

/// `chi_i(x) = x_i / |x|^2`, the inversion of the coordinate function;
/// N-harmonic with an isolated singularity at the origin.
pub fn chi_field(i: usize, n: usize) -> Result<FieldRef, FieldError> {
    if i < 1 || i > n {
        return Err(FieldError::Invalid(format!("axis {i} out of range 1..={n}")));
    }
    Ok(Arc::new(ChiField { axis: i - 1, n }))
}

// --- singular kernels on the unit ball ------------------------------------

fn check_boundary_point(a: &[f64]) -> Result<(), FieldError> {
    if (linalg::norm(a) - 1.0).abs() > 1e-9 {
        return Err(FieldError::Invalid(format!("point {:?} is not on the unit sphere", a)));
    }
    Ok(())
}

struct BallKernel {
    n: usize,
    a: Vec<f64>,
    /// +1 for the interior kernel (1-|x|^2), -1 for the exterior (|x|^2-1).
    sign: f64,
}

impl ScalarField for BallKernel {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        check_dim(self, x)?;
        let w = linalg::sub(x, &self.a);
        let d2 = linalg::dot(&w, &w);
        if d2 == 0.0 {
            return Err(FieldError::SingularPoint { point: self.a.clone() });
        }
        Ok(self.sign * (1.0 - linalg::dot(x, x)) / (2.0 * d2))
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        check_dim(self, x)?;
        let w = linalg::sub(x, &self.a);
        let d2 = linalg::dot(&w, &w);
        if d2 == 0.0 {
            return Err(FieldError::SingularPoint { point: self.a.clone() });
        }
        let num = 1.0 - linalg::dot(x, x);
        // grad [ (1-|x|^2) / (2|x-a|^2) ] = -x/|x-a|^2 - (1-|x|^2)(x-a)/|x-a|^4
        let mut g = vec![0.0; self.n];
        for j in 0..self.n {
            g[j] = self.sign * (-x[j] / d2 - num * w[j] / (d2 * d2));
        }
        Ok(g)
    }
    fn singular_points(&self) -> Vec<Vec<f64>> {
        vec![self.a.clone()]
    }
    fn description(&self) -> String {
        if self.sign > 0.0 {
            format!("interior ball kernel (1-|x|^2)/(2|x-a|^2), a = {:?}", self.a)
        } else {
            format!("exterior ball kernel (|x|^2-1)/(2|x-a|^2), a = {:?}", self.a)
        }
    }
}

/// `U^i(x) = (1 - |x|^2) / (2 |x - a|^2)`: the positive N-harmonic function
/// on the unit ball vanishing on the boundary away from `a`, blowing up like
/// `(1 - |x|)/|x - a|^2` at `a`.
pub fn ball_interior_field(n: usize, a: &[f64]) -> Result<FieldRef, FieldError> {
    check_boundary_point(a)?;
    if a.len() != n {
        return Err(FieldError::DimensionMismatch { expected: n, got: a.len() });
    }
    Ok(Arc::new(BallKernel { n, a: a.to_vec(), sign: 1.0 }))
}

/// `U^e(x) = (|x|^2 - 1) / (2 |x - a|^2)`: the exterior dual of `U^i`,
/// bounded by 1/2 + o(1) at infinity.
pub fn ball_exterior_field(n: usize, a: &[f64]) -> Result<FieldRef, FieldError> {
    check_boundary_point(a)?;
    if a.len() != n {
        return Err(FieldError::DimensionMismatch { expected: n, got: a.len() });
    }
    Ok(Arc::new(BallKernel { n, a: a.to_vec(), sign: -1.0 }))
}

// --- conformal inversion ---------------------------------------------------

struct InvertedField {
    inner: FieldRef,
    center: Vec<f64>,
    power: f64,
}

impl InvertedField {
    fn map(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        let v = linalg::sub(x, &self.center);
        let r2 = linalg::dot(&v, &v);
        if r2 == 0.0 {
            return Err(FieldError::SingularPoint { point: self.center.clone() });
        }
        Ok(linalg::add(&self.center, &linalg::scale(&v, self.power / r2)))
    }
}

impl ScalarField for InvertedField {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        check_dim(self, x)?;
        self.inner.value(&self.map(x)?)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        check_dim(self, x)?;
        let y = self.map(x)?;
        let gi = self.inner.gradient(&y)?;
        // DI = (s/|x-c|^2)(I - 2 u u^T), symmetric
        let v = linalg::sub(x, &self.center);
        let r2 = linalg::dot(&v, &v);
        let u = linalg::scale(&v, 1.0 / r2.sqrt());
        let f = self.power / r2;
        let udot = linalg::dot(&u, &gi);
        let mut g = vec![0.0; x.len()];
        for j in 0..x.len() {
            g[j] = f * (gi[j] - 2.0 * u[j] * udot);
        }
        Ok(g)
    }
    fn singular_points(&self) -> Vec<Vec<f64>> {
        let mut pts = vec![self.center.clone()];
        for q in self.inner.singular_points() {
            // preimage of q under the involutive inversion
            if let Ok(pre) = self.map(&q) {
                pts.push(pre);
            }
        }
        pts
    }
    fn description(&self) -> String {
        format!(
            "({}) composed with inversion about {:?}, power {}",
            self.inner.description(),
            self.center,
            self.power
        )
    }
}

/// Compose `u` with the inversion `I(x) = c + s (x - c)/|x - c|^2`; for
/// `p = N` this preserves N-harmonicity.
pub fn invert_field(u: FieldRef, center: &[f64], power: f64) -> Result<FieldRef, FieldError> {
    if !(power > 0.0) {
        return Err(FieldError::Invalid(format!("inversion power must be > 0, got {power}")));
    }
    if center.len() != u.dim() {
        return Err(FieldError::DimensionMismatch { expected: u.dim(), got: center.len() });
    }
    Ok(Arc::new(InvertedField { inner: u, center: center.to_vec(), power }))
}

// --- separable families -----------------------------------------------------

/// Value and gradient of the plane separable solution `rho^beta omega(theta)`
/// at a point `(x1, x2)` of the coordinate plane, with `theta` in the chart
/// `x1 = rho sin(theta)`, `x2 = rho cos(theta)`.
fn separable_plane(pair: &SpectralPair, x1: f64, x2: f64) -> (f64, [f64; 2]) {
    let rho2 = x1 * x1 + x2 * x2;
    let beta = pair.beta;
    if rho2 == 0.0 {
        // regular branch: value 0; the gradient vanishes for beta > 1 and is
        // taken in the theta = 0 chart for beta = 1 (mode k = 1, omega = sin)
        if beta > 1.0 + 1e-12 {
            return (0.0, [0.0, 0.0]);
        }
        return (0.0, [1.0, 0.0]);
    }
    let rho = rho2.sqrt();
    let theta = x1.atan2(x2);
    let (w, wp) = pair.profile.eval(theta);
    let value = rho.powf(beta) * w;
    let f = rho.powf(beta - 2.0);
    let g1 = f * (beta * w * x1 + wp * x2);
    let g2 = f * (beta * w * x2 - wp * x1);
    (value, [g1, g2])
}

struct Separable2d {
    pair: Arc<SpectralPair>,
}

impl ScalarField for Separable2d {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        check_dim(self, x)?;
        Ok(separable_plane(&self.pair, x[0], x[1]).0)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        check_dim(self, x)?;
        let (_, g) = separable_plane(&self.pair, x[0], x[1]);
        Ok(g.to_vec())
    }
    fn description(&self) -> String {
        format!(
            "separable plane field r^beta omega(theta), p = {}, k = {}",
            self.pair.p, self.pair.k
        )
    }
}

/// Two-dimensional separable p-harmonic function `u = r^beta_k omega_k(theta)`.
pub fn separable_2d(pair: Arc<SpectralPair>) -> FieldRef {
    Arc::new(Separable2d { pair })
}

struct SeparableNd {
    pair: Arc<SpectralPair>,
    n: usize,
}

impl ScalarField for SeparableNd {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        check_dim(self, x)?;
        // Evaluate through the Euler chart: u = (r sin theta_{N-1} ...
        // sin theta_2)^beta omega(theta_1); extends by 0 across chart
        // degeneracies since beta >= 1.
        let e = geometry::to_euler(x, self.n)?;
        let rho = geometry::sine_product_radius(&e);
        if rho == 0.0 {
            return Ok(0.0);
        }
        let (w, _) = self.pair.profile.eval(e.theta[0]);
        Ok(rho.powf(self.pair.beta) * w)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        check_dim(self, x)?;
        // The sine product is the cylindrical radius of the (x1, x2) plane,
        // so the chain rule collapses to the plane gradient padded with zeros.
        let (_, g) = separable_plane(&self.pair, x[0], x[1]);
        let mut grad = vec![0.0; self.n];
        grad[0] = g[0];
        grad[1] = g[1];
        Ok(grad)
    }
    fn description(&self) -> String {
        format!(
            "separable field (r sin(theta_N-1)...sin(theta_2))^beta omega(theta_1), p = {}, k = {}, n = {}",
            self.pair.p, self.pair.k, self.n
        )
    }
}

/// Separable p-harmonic function in `R^n`, `n >= 3`, built from the plane
/// mode through the Euler chart.
pub fn separable_nd(pair: Arc<SpectralPair>, n: usize) -> Result<FieldRef, FieldError> {
    if n < 3 {
        return Err(FieldError::Invalid(format!("separable_nd needs n >= 3, got {n}")));
    }
    Ok(Arc::new(SeparableNd { pair, n }))
}

struct SeparableSingular {
    pair: Arc<SpectralPair>,
    n: usize,
}

impl ScalarField for SeparableSingular {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        check_dim(self, x)?;
        let e = geometry::to_euler(x, self.n)?;
        if e.r == 0.0 {
            return Err(FieldError::SingularPoint { point: vec![0.0; self.n] });
        }
        let rho = geometry::sine_product_radius(&e);
        if rho == 0.0 {
            return Ok(0.0);
        }
        let (w, _) = self.pair.profile.eval(e.theta[0]);
        // r^{-beta} (sin products)^{beta} omega = rho^beta r^{-2 beta} omega
        let beta = self.pair.beta;
        Ok(rho.powf(beta) * e.r.powf(-2.0 * beta) * w)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        check_dim(self, x)?;
        let r2 = linalg::dot(x, x);
        if r2 == 0.0 {
            return Err(FieldError::SingularPoint { point: vec![0.0; self.n] });
        }
        let beta = self.pair.beta;
        let (v, gv) = separable_plane(&self.pair, x[0], x[1]);
        let s = r2.powf(-beta); // |x|^{-2 beta}
        let mut grad = linalg::scale(x, -2.0 * beta * v * s / r2);
        grad[0] += gv[0] * s;
        grad[1] += gv[1] * s;
        Ok(grad)
    }
    fn singular_points(&self) -> Vec<Vec<f64>> {
        vec![vec![0.0; self.n]]
    }
    fn description(&self) -> String {
        format!(
            "singular separable field r^(-beta) (sin products)^beta omega(theta_1), p = {}, k = {}, n = {}",
            self.pair.p, self.pair.k, self.n
        )
    }
}

/// Singular N-harmonic separable function
/// `u = r^{-beta_k} (sin theta_{N-1} ... sin theta_2)^{beta_k} omega_k(theta_1)`;
/// requires the conformal case `p = n`.
pub fn separable_singular(pair: Arc<SpectralPair>, n: usize) -> Result<FieldRef, FieldError> {
    if (pair.p - n as f64).abs() > 1e-12 {
        return Err(FieldError::Invalid(format!(
            "singular separable fields need p = n, got p = {}, n = {}",
            pair.p, n
        )));
    }
    Ok(Arc::new(SeparableSingular { pair, n }))
}

// --- reflection extension ---------------------------------------------------

struct ExtendedField {
    inner: FieldRef,
    geometry: DomainGeometry,
}

impl ScalarField for ExtendedField {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        check_dim(self, x)?;
        let rho = self.geometry.signed_distance(x)?;
        let beta0 = self.geometry.tubular_radius();
        if !(rho.abs() <= beta0) {
            return Err(GeometryError::OutOfTube { rho, beta0 }.into());
        }
        if rho <= 0.0 {
            self.inner.value(x)
        } else {
            let r = self.geometry.reflect(x)?;
            Ok(-self.inner.value(&r.image)?)
        }
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        check_dim(self, x)?;
        let rho = self.geometry.signed_distance(x)?;
        let beta0 = self.geometry.tubular_radius();
        if !(rho.abs() <= beta0) {
            return Err(GeometryError::OutOfTube { rho, beta0 }.into());
        }
        if rho <= 0.0 {
            self.inner.gradient(x)
        } else {
            let r = self.geometry.reflect(x)?;
            let gi = self.inner.gradient(&r.image)?;
            Ok(linalg::scale(&r.jacobian.tr_mul_vec(&gi), -1.0))
        }
    }
    fn singular_points(&self) -> Vec<Vec<f64>> {
        let mut pts = self.inner.singular_points();
        let mut reflected = Vec::new();
        for q in &pts {
            if let Ok(r) = self.geometry.reflect(q) {
                reflected.push(r.image);
            }
        }
        pts.extend(reflected);
        pts
    }
    fn description(&self) -> String {
        format!(
            "odd reflection extension of ({}) through {:?}",
            self.inner.description(),
            self.geometry
        )
    }
}

/// Odd extension `v~ = v` inside, `v~ = -(v o psi)` outside, through the
/// geometry's boundary; defined on the tubular neighborhood.
pub fn extend_field(u: FieldRef, g: DomainGeometry) -> FieldRef {
    Arc::new(ExtendedField { inner: u, geometry: g })
}

// --- trivial wrappers -------------------------------------------------------

struct ScaledField {
    inner: FieldRef,
    factor: f64,
}

impl ScalarField for ScaledField {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        Ok(self.factor * self.inner.value(x)?)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        Ok(linalg::scale(&self.inner.gradient(x)?, self.factor))
    }
    fn singular_points(&self) -> Vec<Vec<f64>> {
        self.inner.singular_points()
    }
    fn description(&self) -> String {
        format!("{} * ({})", self.factor, self.inner.description())
    }
}

pub fn scaled_field(u: FieldRef, factor: f64) -> FieldRef {
    Arc::new(ScaledField { inner: u, factor })
}

struct TranslatedField {
    inner: FieldRef,
    offset: Vec<f64>,
}

impl ScalarField for TranslatedField {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        check_dim(self, x)?;
        self.inner.value(&linalg::sub(x, &self.offset))
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        check_dim(self, x)?;
        self.inner.gradient(&linalg::sub(x, &self.offset))
    }
    fn singular_points(&self) -> Vec<Vec<f64>> {
        self.inner.singular_points().iter().map(|q| linalg::add(q, &self.offset)).collect()
    }
    fn description(&self) -> String {
        format!("({}) translated by {:?}", self.inner.description(), self.offset)
    }
}

/// `x |-> u(x - offset)`.
pub fn translated_field(u: FieldRef, offset: &[f64]) -> Result<FieldRef, FieldError> {
    if offset.len() != u.dim() {
        return Err(FieldError::DimensionMismatch { expected: u.dim(), got: offset.len() });
    }
    Ok(Arc::new(TranslatedField { inner: u, offset: offset.to_vec() }))
}

struct NormSquaredField {
    n: usize,
}

impl ScalarField for NormSquaredField {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        check_dim(self, x)?;
        Ok(linalg::dot(x, x))
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        check_dim(self, x)?;
        Ok(linalg::scale(x, 2.0))
    }
    fn description(&self) -> String {
        format!("|x|^2 in R^{} (not p-harmonic; negative control)", self.n)
    }
}

/// `|x|^2`: deliberately not p-harmonic, used as a negative control.
pub fn norm_squared_field(n: usize) -> FieldRef {
    Arc::new(NormSquaredField { n })
}

// --- serializable descriptors ------------------------------------------------

fn default_resolution() -> usize {
    512
}

/// Serializable description of a constructible field; round-trips through
/// JSON for CLI inputs and outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldDescriptor {
    Coordinate {
        axis: usize,
        n: usize,
    },
    Chi {
        axis: usize,
        n: usize,
    },
    BallInterior {
        n: usize,
        a: Vec<f64>,
    },
    BallExterior {
        n: usize,
        a: Vec<f64>,
    },
    #[serde(rename = "separable-2d")]
    Separable2d {
        p: f64,
        k: u32,
        #[serde(default = "default_resolution")]
        m: usize,
    },
    SeparableNd {
        p: f64,
        k: u32,
        n: usize,
        #[serde(default = "default_resolution")]
        m: usize,
    },
    SeparableSingular {
        k: u32,
        n: usize,
        #[serde(default = "default_resolution")]
        m: usize,
    },
    Inverted {
        inner: Box<FieldDescriptor>,
        center: Vec<f64>,
        power: f64,
    },
    Extended {
        inner: Box<FieldDescriptor>,
        geometry: DomainGeometry,
    },
    Scaled {
        inner: Box<FieldDescriptor>,
        factor: f64,
    },
    Translated {
        inner: Box<FieldDescriptor>,
        offset: Vec<f64>,
    },
    NormSquared {
        n: usize,
    },
}

/// Construct the field a descriptor names.
pub fn build_field(desc: &FieldDescriptor) -> Result<FieldRef, FieldError> {
    Ok(match desc {
        FieldDescriptor::Coordinate { axis, n } => coordinate_field(*axis, *n, 2.0)?,
        FieldDescriptor::Chi { axis, n } => chi_field(*axis, *n)?,
        FieldDescriptor::BallInterior { n, a } => ball_interior_field(*n, a)?,
        FieldDescriptor::BallExterior { n, a } => ball_exterior_field(*n, a)?,
        FieldDescriptor::Separable2d { p, k, m } => {
            separable_2d(Arc::new(spectral::tabulate(*p, *k, *m)?))
        }
        FieldDescriptor::SeparableNd { p, k, n, m } => {
            separable_nd(Arc::new(spectral::tabulate(*p, *k, *m)?), *n)?
        }
        FieldDescriptor::SeparableSingular { k, n, m } => {
            separable_singular(Arc::new(spectral::tabulate(*n as f64, *k, *m)?), *n)?
        }
        FieldDescriptor::Inverted { inner, center, power } => {
            invert_field(build_field(inner)?, center, *power)?
        }
        FieldDescriptor::Extended { inner, geometry } => {
            extend_field(build_field(inner)?, geometry.clone())
        }
        FieldDescriptor::Scaled { inner, factor } => scaled_field(build_field(inner)?, *factor),
        FieldDescriptor::Translated { inner, offset } => {
            translated_field(build_field(inner)?, offset)?
        }
        FieldDescriptor::NormSquared { n } => norm_squared_field(*n),
    })
}
