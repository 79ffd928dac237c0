//! Boundary reconstruction errors.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::forward::{sample_curve, Aperture, ParametricCurve};
use crate::types::{e_r, Vec2};

/// Samples used by every boundary metric.
pub const METRIC_SAMPLES: usize = 512;
const TRACE_SAMPLES: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    RadialL2,
    Hausdorff,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::RadialL2 => "radial_l2",
            Metric::Hausdorff => "hausdorff",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryError {
    pub metric: Metric,
    pub value: f64,
}

/// Radial function `r(theta_j)` at `n` equispaced polar angles, or `None`
/// when some ray from the origin meets the curve more than once.
pub fn radial_samples(curve: &dyn ParametricCurve, n: usize) -> Option<Vec<f64>> {
    let pts = sample_curve(curve, TRACE_SAMPLES);
    if pts.iter().any(|p| p.norm() < 1e-12) {
        return None;
    }
    let mut angles = Vec::with_capacity(pts.len() + 1);
    let mut acc = pts[0].y.atan2(pts[0].x);
    angles.push(acc);
    for i in 1..=pts.len() {
        let (a, b) = (pts[i - 1], pts[i % pts.len()]);
        acc += a.perp(&b).atan2(a.dot(&b));
        angles.push(acc);
    }
    let steps: Vec<f64> = angles.windows(2).map(|w| w[1] - w[0]).collect();
    let sign = if steps.iter().all(|d| *d > 0.0) {
        1.0
    } else if steps.iter().all(|d| *d < 0.0) {
        -1.0
    } else {
        return None;
    };
    if ((angles[angles.len() - 1] - angles[0]) * sign - TAU).abs() > 1e-6 {
        return None;
    }
    let start = angles[0];
    (0..n)
        .map(|j| {
            let theta = TAU * j as f64 / n as f64;
            let u = (sign * (theta - start)).rem_euclid(TAU);
            let i = angles
                .partition_point(|a| sign * (a - start) <= u)
                .saturating_sub(1)
                .min(pts.len() - 1);
            ray_hit(pts[i], pts[(i + 1) % pts.len()], theta)
        })
        .collect()
}

fn ray_hit(a: Vec2, b: Vec2, theta: f64) -> Option<f64> {
    let d = e_r(theta);
    let seg = b - a;
    let den = d.perp(&seg);
    if den.abs() < 1e-300 {
        return Some(a.norm());
    }
    let s = a.perp(&seg) / den;
    (s > 0.0).then_some(s)
}

/// `sqrt(int (r_a - r_b)^2 dtheta)` over the angles selected by `keep`.
fn radial_distance(a: &[f64], b: &[f64], keep: impl Fn(f64) -> bool) -> f64 {
    let n = a.len();
    let h = TAU / n as f64;
    (0..n)
        .filter(|&j| keep(h * j as f64))
        .map(|j| (a[j] - b[j]).powi(2) * h)
        .sum::<f64>()
        .sqrt()
}

/// Directed Hausdorff distance `max_{p in a} min_{q in b} |p - q|`.
pub fn directed_hausdorff(a: &[Vec2], b: &[Vec2]) -> f64 {
    a.iter()
        .map(|p| b.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn hausdorff(a: &[Vec2], b: &[Vec2]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// Radial L2 when both curves are star-shaped about the origin, symmetric
/// Hausdorff on 512 samples otherwise.
pub fn boundary_error(truth: &dyn ParametricCurve, recon: &dyn ParametricCurve) -> BoundaryError {
    match (radial_samples(truth, METRIC_SAMPLES), radial_samples(recon, METRIC_SAMPLES)) {
        (Some(a), Some(b)) => BoundaryError {
            metric: Metric::RadialL2,
            value: radial_distance(&a, &b, |_| true),
        },
        _ => BoundaryError {
            metric: Metric::Hausdorff,
            value: hausdorff_error(truth, recon),
        },
    }
}

/// Symmetric Hausdorff distance on 512 samples of each curve.
pub fn hausdorff_error(truth: &dyn ParametricCurve, recon: &dyn ParametricCurve) -> f64 {
    hausdorff(&sample_curve(truth, METRIC_SAMPLES), &sample_curve(recon, METRIC_SAMPLES))
}

/// Error restricted to polar angles inside `arc`. Falls back to the
/// distance from truth points in the arc to the reconstruction.
pub fn arc_error(truth: &dyn ParametricCurve, recon: &dyn ParametricCurve, arc: Aperture) -> BoundaryError {
    match (radial_samples(truth, METRIC_SAMPLES), radial_samples(recon, METRIC_SAMPLES)) {
        (Some(a), Some(b)) => BoundaryError {
            metric: Metric::RadialL2,
            value: radial_distance(&a, &b, |th| arc.contains(th)),
        },
        _ => {
            let inside: Vec<Vec2> = sample_curve(truth, METRIC_SAMPLES)
                .into_iter()
                .filter(|p| arc.contains(p.y.atan2(p.x)))
                .collect();
            BoundaryError {
                metric: Metric::Hausdorff,
                value: directed_hausdorff(&inside, &sample_curve(recon, METRIC_SAMPLES)),
            }
        }
    }
}
