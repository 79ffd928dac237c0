//! Named obstacle shapes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{sample_curve, Circle, ParametricCurve};
use crate::types::Vec2;

/// `c0 + sum_j (cos[j-1] cos jt + sin[j-1] sin jt)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrigSeries {
    pub c0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigSeries {
    fn value(&self, t: f64) -> f64 {
        let mut v = self.c0;
        for (j, a) in self.cos.iter().enumerate() {
            v += a * ((j + 1) as f64 * t).cos();
        }
        for (j, b) in self.sin.iter().enumerate() {
            v += b * ((j + 1) as f64 * t).sin();
        }
        v
    }

    fn derivative(&self, t: f64) -> f64 {
        let mut v = 0.0;
        for (j, a) in self.cos.iter().enumerate() {
            let m = (j + 1) as f64;
            v -= a * m * (m * t).sin();
        }
        for (j, b) in self.sin.iter().enumerate() {
            let m = (j + 1) as f64;
            v += b * m * (m * t).cos();
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    Disk {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    /// `(cos t + 0.65 cos 2t - 0.65, 1.5 sin t)`
    Kite {},
    /// `(1.5 cos t + 0.15 cos 4t + 0.15 cos 6t, 1.5 sin t - 0.15 sin 4t + 0.15 sin 6t)`
    Starfish {},
    Trig { x: TrigSeries, y: TrigSeries },
}

impl ShapeSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeSpec::Disk { .. } => "disk",
            ShapeSpec::Kite {} => "kite",
            ShapeSpec::Starfish {} => "starfish",
            ShapeSpec::Trig { .. } => "trig",
        }
    }

    pub fn curve(&self) -> Shape {
        Shape(self.clone())
    }

    /// The curve must be closed, simple and bounded away from zero speed.
    pub fn validate(&self) -> Result<()> {
        if let ShapeSpec::Disk { radius, center } = self {
            if !(*radius > 0.0) || !center.iter().all(|c| c.is_finite()) {
                return Err(Error::config("shape.radius", "must be positive and finite"));
            }
        }
        let shape = self.curve();
        let n = 512;
        let pts = sample_curve(&shape, n);
        if pts.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::config("shape", "non-finite boundary point"));
        }
        for i in 0..n {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            if !(shape.tangent(t).norm() > 1e-10) {
                return Err(Error::config("shape", format!("vanishing tangent at t = {t}")));
            }
        }
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                    return Err(Error::config("shape", "boundary curve intersects itself"));
                }
            }
        }
        Ok(())
    }
}

fn segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let orient = |p: Vec2, q: Vec2, r: Vec2| (q - p).perp(&(r - p));
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// A [`ShapeSpec`] usable as a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape(pub ShapeSpec);

impl ParametricCurve for Shape {
    fn point(&self, t: f64) -> Vec2 {
        match &self.0 {
            ShapeSpec::Disk { radius, center } => {
                Circle::new(Vec2::new(center[0], center[1]), *radius).point(t)
            }
            ShapeSpec::Kite {} => Vec2::new(t.cos() + 0.65 * (2.0 * t).cos() - 0.65, 1.5 * t.sin()),
            ShapeSpec::Starfish {} => Vec2::new(
                1.5 * t.cos() + 0.15 * (4.0 * t).cos() + 0.15 * (6.0 * t).cos(),
                1.5 * t.sin() - 0.15 * (4.0 * t).sin() + 0.15 * (6.0 * t).sin(),
            ),
            ShapeSpec::Trig { x, y } => Vec2::new(x.value(t), y.value(t)),
        }
    }

    fn tangent(&self, t: f64) -> Vec2 {
        match &self.0 {
            ShapeSpec::Disk { radius, center } => {
                Circle::new(Vec2::new(center[0], center[1]), *radius).tangent(t)
            }
            ShapeSpec::Kite {} => Vec2::new(-t.sin() - 1.3 * (2.0 * t).sin(), 1.5 * t.cos()),
            ShapeSpec::Starfish {} => Vec2::new(
                -1.5 * t.sin() - 0.6 * (4.0 * t).sin() - 0.9 * (6.0 * t).sin(),
                1.5 * t.cos() - 0.6 * (4.0 * t).cos() + 0.9 * (6.0 * t).cos(),
            ),
            ShapeSpec::Trig { x, y } => Vec2::new(x.derivative(t), y.derivative(t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_tangent(s: &ShapeSpec) {
        let c = s.curve();
        let h = 1e-6;
        for i in 0..37 {
            let t = 0.17 * i as f64;
            let fd = (c.point(t + h) - c.point(t - h)) / (2.0 * h);
            assert!((fd - c.tangent(t)).norm() < 1e-8, "{} at {t}", s.name());
        }
    }

    #[test]
    fn tangents_match_differences() {
        let trig = ShapeSpec::Trig {
            x: TrigSeries { c0: 0.1, cos: vec![1.2, 0.0, 0.1], sin: vec![] },
            y: TrigSeries { c0: 0.0, cos: vec![], sin: vec![1.0, 0.05] },
        };
        for s in [ShapeSpec::Disk { radius: 1.0, center: [0.2, 0.0] }, ShapeSpec::Kite {}, ShapeSpec::Starfish {}, trig] {
            check_tangent(&s);
            s.validate().unwrap();
        }
    }

    #[test]
    fn kite_landmarks() {
        let k = ShapeSpec::Kite {}.curve();
        assert!((k.point(0.0) - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert!((k.point(std::f64::consts::PI) - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn looped_limacon_rejected() {
        let s = ShapeSpec::Trig {
            x: TrigSeries { c0: 0.5, cos: vec![0.5, 0.5], sin: vec![] },
            y: TrigSeries { c0: 0.0, cos: vec![], sin: vec![0.5, 0.5] },
        };
        assert!(s.validate().is_err());
        assert!(ShapeSpec::Disk { radius: -1.0, center: [0.0, 0.0] }.validate().is_err());
    }

    #[test]
    fn toml_forms() {
        let s: ShapeSpec = toml::from_str("kind = \"disk\"\nradius = 1.0").unwrap();
        assert_eq!(s, ShapeSpec::Disk { radius: 1.0, center: [0.0, 0.0] });
        let s: ShapeSpec = toml::from_str("kind = \"kite\"").unwrap();
        assert_eq!(s, ShapeSpec::Kite {});
        assert!(toml::from_str::<ShapeSpec>("kind = \"kite\"\nradius = 1").is_err());
    }
}
