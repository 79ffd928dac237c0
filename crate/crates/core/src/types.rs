//! Small fixed-size vector and matrix aliases shared by every module.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

/// A point or direction in the plane.
pub type Vec2 = Vector2<f64>;

/// Elastic displacement at a point: two complex Cartesian components.
pub type DisplacementValue = Vector2<Complex64>;

/// 2x2 complex matrix. Gradients use the Jacobian layout `m[(i, k)] = d u_i / d x_k`.
pub type CMat2 = Matrix2<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Unit radial vector `e_r(theta)`.
#[inline]
pub fn e_r(theta: f64) -> Vec2 {
    Vec2::new(theta.cos(), theta.sin())
}

/// Unit angular vector `e_theta(theta)`.
#[inline]
pub fn e_theta(theta: f64) -> Vec2 {
    Vec2::new(-theta.sin(), theta.cos())
}

/// Promote a real vector to complex.
#[inline]
pub(crate) fn complexify(v: &Vec2) -> DisplacementValue {
    Vector2::new(c(v.x), c(v.y))
}

/// `(r, theta)` of a point, with `theta` in `(-pi, pi]`.
#[inline]
pub fn polar(x: &Vec2) -> (f64, f64) {
    (x.norm(), x.y.atan2(x.x))
}

/// Wrap an angle into `[0, 2pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let w = theta.rem_euclid(tau);
    if w >= tau {
        0.0
    } else {
        w
    }
}
