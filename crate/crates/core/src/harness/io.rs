//! CSV exports.

use std::f64::consts::TAU;
use std::io::Write;

use crate::error::Result;
use crate::forward::ParametricCurve;
use crate::newton::ReconRun;

/// Points in every boundary export.
pub const BOUNDARY_SAMPLES: usize = 512;

/// `t,x,y` at `n` equispaced parameters.
pub fn write_boundary_csv<W: Write>(out: W, curve: &dyn ParametricCurve, n: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y"])?;
    for i in 0..n {
        let t = TAU * i as f64 / n as f64;
        let p = curve.point(t);
        w.write_record([t.to_string(), p.x.to_string(), p.y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per iteration with the update size, residual and accepted iterate.
pub fn write_history_csv<W: Write>(out: W, run: &ReconRun) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let degree = run.final_curve().degree();
    let mut header = vec!["iteration".to_string(), "e_m".into(), "residual_rms".into(), "damping".into()];
    header.push("a0".into());
    header.extend((1..=degree).map(|j| format!("a{j}")));
    header.extend((1..=degree).map(|j| format!("b{j}")));
    w.write_record(&header)?;
    for (m, curve) in run.iterates.iter().enumerate().skip(1) {
        let mut row = vec![
            m.to_string(),
            run.updates[m - 1].to_string(),
            run.residuals[m - 1].to_string(),
            run.dampings[m - 1].to_string(),
        ];
        row.extend(curve.coeffs().iter().map(|c| c.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
