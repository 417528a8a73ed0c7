//! Travelling-wave dynamics of the nonlinear complex heat equation.
//!
//! Writing a uniformly translating and rotating solution as
//! `A(x, t) = B(x - v t) e^{i ω t}` with `B = a e^{iθ}`, `κ = a'/a`, `q = θ'`
//! and `z = κ + i q`, the profile equation `-v B' + i ω B = i|B|²B + B''`
//! becomes a three-dimensional autonomous system in `(a, κ, q)`. Everything in
//! this module is evaluated with the frequency normalized to `ω = 1`, except
//! [`rhs_general`] which exists for the scale symmetry.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DynamicsError {
    #[error("velocity must be positive, got {0}")]
    NonPositiveVelocity(f64),
    #[error("velocity must be finite, got {0}")]
    NonFiniteVelocity(f64),
}

/// Velocity and frequency of a translating, rotating solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub v: f64,
    pub omega: f64,
}

impl Params {
    /// Parameters with the frequency normalized to one.
    pub fn normalized(v: f64) -> Self {
        Self { v, omega: 1.0 }
    }
}

/// A state `(a, κ, q)` of the travelling-wave system.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub a: f64,
    pub kappa: f64,
    pub q: f64,
}

impl PhasePoint {
    pub const fn new(a: f64, kappa: f64, q: f64) -> Self {
        Self { a, kappa, q }
    }

    /// The homogeneous state of amplitude one.
    pub const fn unit() -> Self {
        Self::new(1.0, 0.0, 0.0)
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.kappa, self.q)
    }

    pub fn from_az(a: f64, z: Complex64) -> Self {
        Self::new(a, z.re, z.im)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.kappa, self.q]
    }

    pub fn from_array(x: [f64; 3]) -> Self {
        Self::new(x[0], x[1], x[2])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.a * other.a + self.kappa * other.kappa + self.q * other.q
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.kappa.is_finite() && self.q.is_finite()
    }

    /// Euclidean distance to `(1, 0, 0)`.
    pub fn distance_to_unit(&self) -> f64 {
        (*self - Self::unit()).norm()
    }
}

impl Add for PhasePoint {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.kappa + rhs.kappa, self.q + rhs.q)
    }
}

impl Sub for PhasePoint {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.kappa - rhs.kappa, self.q - rhs.q)
    }
}

impl Mul<PhasePoint> for f64 {
    type Output = PhasePoint;
    fn mul(self, rhs: PhasePoint) -> PhasePoint {
        PhasePoint::new(self * rhs.a, self * rhs.kappa, self * rhs.q)
    }
}

impl Mul<f64> for PhasePoint {
    type Output = PhasePoint;
    fn mul(self, rhs: f64) -> PhasePoint {
        rhs * self
    }
}

/// Vector field of the `(a, κ, q)` system at `ω = 1`.
pub fn rhs_akq(p: PhasePoint, v: f64) -> PhasePoint {
    rhs_general(p, Params::normalized(v))
}

/// Vector field of the `(a, κ, q)` system for arbitrary frequency.
pub fn rhs_general(p: PhasePoint, params: Params) -> PhasePoint {
    let PhasePoint { a, kappa, q } = p;
    let v = params.v;
    PhasePoint::new(
        kappa * a,
        -v * kappa + q * q - kappa * kappa,
        params.omega - a * a - v * q - 2.0 * q * kappa,
    )
}

/// Vector field in the `(a, z)` form: `a' = (Re z) a`, `z' = i(1 - a²) - v z - z²`.
pub fn rhs_az(a: f64, z: Complex64, v: f64) -> (f64, Complex64) {
    let dz = Complex64::i() * (1.0 - a * a) - v * z - z * z;
    (z.re * a, dz)
}

/// `a'' = q² a - v a'`, the amplitude equation obtained by eliminating `κ`.
pub fn second_derivative_a(p: PhasePoint, v: f64) -> f64 {
    p.q * p.q * p.a - v * p.kappa * p.a
}

/// The two equilibria `z₋(v)`, `z₊(v)` of the invariant plane `a = 0`,
/// roots of `z² + v z - i = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPair {
    pub z_minus: Complex64,
    pub z_plus: Complex64,
    /// `α + iβ` is the square root of `v² + 4i` with positive real part.
    pub alpha: f64,
    pub beta: f64,
}

pub fn zero_plane_equilibria(v: f64) -> Result<EquilibriumPair, DynamicsError> {
    if !v.is_finite() {
        return Err(DynamicsError::NonFiniteVelocity(v));
    }
    let disc = Complex64::new(v * v, 4.0);
    // Principal branch in polar form; Re > 0 since the argument lies in (0, π).
    let (r, phi) = disc.to_polar();
    let root = Complex64::from_polar(r.sqrt(), 0.5 * phi);
    debug_assert!(root.re > 0.0);
    let vv = Complex64::new(v, 0.0);
    Ok(EquilibriumPair {
        z_minus: -(vv + root) * 0.5,
        z_plus: (root - vv) * 0.5,
        alpha: root.re,
        beta: root.im,
    })
}

/// Linearization of the `ω = 1` system at `(1, 0, 0)` and its eigenstructure.
///
/// The matrix is lower triangular with eigenvalues `0` and `-v` (double, with a
/// Jordan block), so the eigenstructure is returned in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    /// Row-major, in `(a, κ, q)` coordinates.
    pub matrix: [[f64; 3]; 3],
    /// `[-v, -v, 0]`.
    pub eigenvalues: [f64; 3],
    /// Kernel direction `(v, 0, -2)`.
    pub center_direction: [f64; 3],
    /// Normal `(v, 1, 0)` of the stable tangent plane.
    pub stable_plane_normal: [f64; 3],
    /// Eigenvector `(0, 0, 1)` of the Jordan block.
    pub fast_direction: [f64; 3],
    /// Generalized eigenvector `(-1, v, 0)` completing the stable plane.
    pub stable_generalized: [f64; 3],
}

impl Linearization {
    pub fn apply(&self, x: [f64; 3]) -> [f64; 3] {
        let m = &self.matrix;
        [
            m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
            m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
            m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
        ]
    }

    /// Coordinates `(s_fast, s_gen, c)` of the displacement `x - (1,0,0)` in
    /// the basis `(fast_direction, stable_generalized, center_direction)`.
    pub fn decompose(&self, x: PhasePoint) -> (f64, f64, f64) {
        let v = self.center_direction[0];
        let da = x.a - 1.0;
        let s_gen = x.kappa / v;
        let c = (da + s_gen) / v;
        let s_fast = x.q + 2.0 * c;
        (s_fast, s_gen, c)
    }
}

pub fn linearization_at_one(v: f64) -> Result<Linearization, DynamicsError> {
    check_positive(v)?;
    Ok(Linearization {
        matrix: [[0.0, 1.0, 0.0], [0.0, -v, 0.0], [-2.0, 0.0, -v]],
        eigenvalues: [-v, -v, 0.0],
        center_direction: [v, 0.0, -2.0],
        stable_plane_normal: [v, 1.0, 0.0],
        fast_direction: [0.0, 0.0, 1.0],
        stable_generalized: [-1.0, v, 0.0],
    })
}

/// Second-order coefficients of the center manifold of `(1, 0, 0)`, written as
/// a graph over `a`: `κ = κ₂(1-a)² + …`, `q = q₁(1-a) + q₂(1-a)² + …`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterCoeffs {
    pub kappa2: f64,
    pub q1: f64,
    pub q2: f64,
}

impl CenterCoeffs {
    /// Point of the second-order center manifold at amplitude `a`.
    pub fn point(&self, a: f64) -> PhasePoint {
        let u = 1.0 - a;
        PhasePoint::new(a, self.kappa2 * u * u, self.q1 * u + self.q2 * u * u)
    }
}

pub fn center_manifold_coeffs(v: f64) -> Result<CenterCoeffs, DynamicsError> {
    check_positive(v)?;
    Ok(CenterCoeffs {
        kappa2: 4.0 / v.powi(3),
        q1: 2.0 / v,
        q2: 8.0 / v.powi(5) - 1.0 / v,
    })
}

pub(crate) fn check_positive(v: f64) -> Result<(), DynamicsError> {
    if !v.is_finite() {
        Err(DynamicsError::NonFiniteVelocity(v))
    } else if v <= 0.0 {
        Err(DynamicsError::NonPositiveVelocity(v))
    } else {
        Ok(())
    }
}
