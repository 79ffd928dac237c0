//! Closed parametric curves and the geometric queries the solvers need.

use std::f64::consts::TAU;

use crate::types::Vec2;

/// A closed, 2pi-periodic, non-self-intersecting curve `t -> x(t)`.
pub trait ParametricCurve: Send + Sync {
    fn point(&self, t: f64) -> Vec2;
    fn tangent(&self, t: f64) -> Vec2;
}

/// A circle, the simplest obstacle and the one with an analytic solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Vec2, radius: f64) -> Self {
        Circle { center, radius }
    }

    pub fn centered(radius: f64) -> Self {
        Circle::new(Vec2::zeros(), radius)
    }
}

impl ParametricCurve for Circle {
    fn point(&self, t: f64) -> Vec2 {
        self.center + Vec2::new(t.cos(), t.sin()) * self.radius
    }

    fn tangent(&self, t: f64) -> Vec2 {
        Vec2::new(-t.sin(), t.cos()) * self.radius
    }
}

impl<C: ParametricCurve + ?Sized> ParametricCurve for &C {
    fn point(&self, t: f64) -> Vec2 {
        (**self).point(t)
    }
    fn tangent(&self, t: f64) -> Vec2 {
        (**self).tangent(t)
    }
}

/// `n` points at equispaced parameters `2 pi i / n`.
pub fn sample_curve(curve: &dyn ParametricCurve, n: usize) -> Vec<Vec2> {
    (0..n).map(|i| curve.point(TAU * i as f64 / n as f64)).collect()
}

const GEOMETRY_SAMPLES: usize = 1024;

/// Area centroid of the region enclosed by the curve.
pub fn centroid(curve: &dyn ParametricCurve) -> Vec2 {
    let pts = sample_curve(curve, GEOMETRY_SAMPLES);
    let mut area = 0.0;
    let mut acc = Vec2::zeros();
    for (i, a) in pts.iter().enumerate() {
        let b = pts[(i + 1) % pts.len()];
        let cross = a.x * b.y - b.x * a.y;
        area += cross;
        acc += (a + b) * cross;
    }
    if area.abs() < f64::EPSILON {
        return pts.iter().sum::<Vec2>() / pts.len() as f64;
    }
    acc / (3.0 * area)
}

/// True if `p` lies strictly inside the curve (nonzero winding number).
pub fn contains(curve: &dyn ParametricCurve, p: &Vec2) -> bool {
    let pts = sample_curve(curve, GEOMETRY_SAMPLES);
    let mut total = 0.0;
    for (i, a) in pts.iter().enumerate() {
        let b = pts[(i + 1) % pts.len()];
        let (u, v) = (a - p, b - p);
        total += (u.x * v.y - u.y * v.x).atan2(u.dot(&v));
    }
    total.abs() > std::f64::consts::PI
}

/// Twice the signed enclosed area is positive for counterclockwise curves.
pub fn is_counterclockwise(curve: &dyn ParametricCurve) -> bool {
    let pts = sample_curve(curve, GEOMETRY_SAMPLES);
    let twice_area: f64 = pts
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let b = pts[(i + 1) % pts.len()];
            a.x * b.y - b.x * a.y
        })
        .sum();
    twice_area > 0.0
}

/// Unit normal pointing into the enclosed region.
pub fn inward_normal(curve: &dyn ParametricCurve, t: f64, ccw: bool) -> Vec2 {
    let tg = curve.tangent(t);
    let n = Vec2::new(-tg.y, tg.x) / tg.norm();
    if ccw {
        n
    } else {
        -n
    }
}

/// Signed curvature, positive where the curve bends towards its interior.
pub fn curvature(curve: &dyn ParametricCurve, t: f64, ccw: bool) -> f64 {
    let h = 1e-5;
    let d1 = curve.tangent(t);
    let d2 = (curve.tangent(t + h) - curve.tangent(t - h)) / (2.0 * h);
    let k = (d1.x * d2.y - d1.y * d2.x) / d1.norm().powi(3);
    if ccw {
        k
    } else {
        -k
    }
}

/// Mean distance from the centroid to the curve.
pub fn mean_radius(curve: &dyn ParametricCurve) -> f64 {
    let c = centroid(curve);
    let pts = sample_curve(curve, GEOMETRY_SAMPLES);
    pts.iter().map(|p| (p - c).norm()).sum::<f64>() / pts.len() as f64
}

/// Largest distance from the origin over a sampled curve.
pub fn max_radius(curve: &dyn ParametricCurve) -> f64 {
    sample_curve(curve, GEOMETRY_SAMPLES)
        .iter()
        .map(|p| p.norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_geometry() {
        let c = Circle::new(Vec2::new(0.3, -0.2), 2.0);
        assert!((centroid(&c) - c.center).norm() < 1e-12);
        assert!(contains(&c, &Vec2::new(1.0, 0.5)));
        assert!(!contains(&c, &Vec2::new(2.5, 0.0)));
        assert!((max_radius(&Circle::centered(1.5)) - 1.5).abs() < 1e-12);
        assert!(is_counterclockwise(&c));
        assert!((curvature(&c, 0.4, true) - 0.5).abs() < 1e-8);
        assert!((inward_normal(&c, 0.0, true) - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((mean_radius(&c) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tangent_matches_difference() {
        let c = Circle::new(Vec2::new(1.0, 1.0), 0.7);
        let h = 1e-6;
        for t in [0.0, 1.0, 4.0] {
            let fd = (c.point(t + h) - c.point(t - h)) / (2.0 * h);
            assert!((fd - c.tangent(t)).norm() < 1e-8);
        }
    }
}
