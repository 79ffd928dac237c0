//! Static SVG overlays of a reconstruction.

use std::f64::consts::TAU;
use std::fmt::Write;

use crate::elastic::PointSource;
use crate::forward::{sample_curve, Aperture, ParametricCurve};
use crate::types::Vec2;

pub struct Overlay<'a> {
    pub truth: Option<&'a dyn ParametricCurve>,
    pub initial: &'a dyn ParametricCurve,
    pub reconstruction: &'a dyn ParametricCurve,
    pub rho: f64,
    pub aperture: Aperture,
    pub sources: &'a [PointSource],
    pub title: String,
}

const SIZE: f64 = 600.0;
const CURVE_SAMPLES: usize = 256;

fn xy(p: Vec2, scale: f64) -> (f64, f64) {
    (SIZE / 2.0 + p.x * scale, SIZE / 2.0 - p.y * scale)
}

fn polyline(out: &mut String, pts: &[Vec2], scale: f64, closed: bool, style: &str) {
    let mut d = String::new();
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = xy(*p, scale);
        let _ = write!(d, "{}{x:.3},{y:.3}", if i == 0 { "M" } else { " L" });
    }
    if closed {
        d.push_str(" Z");
    }
    let _ = writeln!(out, r#"  <path d="{d}" fill="none" {style}/>"#);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Exact curve red solid, initial guess green dashed, reconstruction black
/// dash-dot, receiver circle blue dashed with the measured arc drawn solid.
pub fn render_svg(o: &Overlay) -> String {
    let scale = SIZE / 2.0 / (1.15 * o.rho);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "  <title>{}</title>", escape(&o.title));
    let _ = writeln!(s, r#"  <rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);

    let circle: Vec<Vec2> = (0..CURVE_SAMPLES)
        .map(|i| Vec2::new((TAU * i as f64 / CURVE_SAMPLES as f64).cos(), (TAU * i as f64 / CURVE_SAMPLES as f64).sin()) * o.rho)
        .collect();
    polyline(&mut s, &circle, scale, true, r##"stroke="#1f4fd1" stroke-width="1" stroke-dasharray="6 4""##);
    if !o.aperture.is_full() {
        let arc: Vec<Vec2> = (0..=CURVE_SAMPLES)
            .map(|i| {
                let th = o.aperture.lo + o.aperture.width() * i as f64 / CURVE_SAMPLES as f64;
                Vec2::new(th.cos(), th.sin()) * o.rho
            })
            .collect();
        polyline(&mut s, &arc, scale, false, r##"stroke="#1f4fd1" stroke-width="3""##);
        let _ = writeln!(
            s,
            r##"  <text x="10" y="{:.0}" font-family="sans-serif" font-size="13" fill="#1f4fd1">partial aperture [{:.4}, {:.4})</text>"##,
            SIZE - 12.0,
            o.aperture.lo,
            o.aperture.hi
        );
    }
    if let Some(truth) = o.truth {
        polyline(&mut s, &sample_curve(truth, CURVE_SAMPLES), scale, true, r##"stroke="#d62728" stroke-width="2""##);
    }
    polyline(
        &mut s,
        &sample_curve(o.initial, CURVE_SAMPLES),
        scale,
        true,
        r##"stroke="#2ca02c" stroke-width="1.5" stroke-dasharray="8 5""##,
    );
    polyline(
        &mut s,
        &sample_curve(o.reconstruction, CURVE_SAMPLES),
        scale,
        true,
        r##"stroke="black" stroke-width="2" stroke-dasharray="10 4 2 4""##,
    );
    for src in o.sources {
        let (x, y) = xy(src.location, scale);
        let _ = writeln!(s, r##"  <circle cx="{x:.3}" cy="{y:.3}" r="3.5" fill="#d62728"/>"##);
    }
    let _ = writeln!(
        s,
        r#"  <text x="10" y="20" font-family="sans-serif" font-size="14">{}</text>"#,
        escape(&o.title)
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{sources_on_circle, Circle};

    #[test]
    fn deterministic_and_well_formed() {
        let srcs = sources_on_circle(4, 3.0, Vec2::new(1.0, 0.0)).unwrap();
        let truth = Circle::centered(1.0);
        let o = Overlay {
            truth: Some(&truth),
            initial: &Circle::centered(2.0),
            reconstruction: &Circle::centered(1.01),
            rho: 3.0,
            aperture: Aperture::new(0.0, 3.0).unwrap(),
            sources: &srcs,
            title: "disk <test>".into(),
        };
        let a = render_svg(&o);
        assert_eq!(a, render_svg(&o));
        assert!(a.starts_with("<?xml"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<circle").count(), 4);
        assert!(a.contains("partial aperture"));
        assert!(a.contains("disk &lt;test&gt;"));
    }
}
