//! Fourier–Bessel representation of the scattered field outside a disk of
//! radius `R`, recovered from measurements on the circle of radius `rho`.
//!
//! The field is written through its compressional and shear potentials,
//! each expanded in `H_n(k r) / H_n(k R) e^{i n theta}`; the normalization
//! keeps every coefficient of order one regardless of `n`.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elastic::LameSystem;
use crate::error::{Error, Result};
use crate::forward::Trace;
use crate::linalg::{LeastSquares, Regularization};
use crate::specfun::HankelTable;
use crate::types::{e_r, e_theta, polar, CMat2, DisplacementValue, Vec2, I};

/// `|det|` below which a modal 2x2 system is treated as singular.
pub const MODAL_DET_FLOOR: f64 = 1e-300;

/// Projections of one circle trace onto `U_n = e^{in theta} e_r` and
/// `V_n = e^{in theta} e_theta`, for `n = -N..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalRhs {
    pub fp: Vec<Complex64>,
    pub fs: Vec<Complex64>,
}

impl ModalRhs {
    pub fn order(&self) -> usize {
        self.fp.len() / 2
    }

    pub fn get(&self, n: i32) -> (Complex64, Complex64) {
        let k = (n + self.order() as i32) as usize;
        (self.fp[k], self.fs[k])
    }
}

/// Radial factors of one mode at one radius.
#[derive(Debug, Clone, Copy)]
struct ModeFactors {
    /// `k H_n'(k r) / H_n(k R)`
    alpha: [Complex64; 2],
    /// `H_n(k r) / H_n(k R)`
    beta: [Complex64; 2],
    /// `k^2 H_n''(k r) / H_n(k R)`
    kappa: [Complex64; 2],
}

fn wall_tables(order: usize, r_inner: f64, sys: &LameSystem) -> Result<[HankelTable; 2]> {
    Ok([
        HankelTable::new(order, sys.kp() * r_inner)?,
        HankelTable::new(order, sys.ks() * r_inner)?,
    ])
}

fn mode_factors(
    order: usize,
    r: f64,
    walls: &[HankelTable; 2],
    sys: &LameSystem,
) -> Result<Vec<ModeFactors>> {
    let ks = [sys.kp(), sys.ks()];
    let at_r = [
        HankelTable::new(order, ks[0] * r)?,
        HankelTable::new(order, ks[1] * r)?,
    ];
    let n_max = order as i32;
    Ok((-n_max..=n_max)
        .map(|n| {
            let mut f = ModeFactors {
                alpha: [Complex64::default(); 2],
                beta: [Complex64::default(); 2],
                kappa: [Complex64::default(); 2],
            };
            for w in 0..2 {
                let k = ks[w];
                let denom = walls[w].value(n);
                f.alpha[w] = k * at_r[w].d1(n) / denom;
                f.beta[w] = at_r[w].value(n) / denom;
                f.kappa[w] = k * k * at_r[w].d2(n) / denom;
            }
            f
        })
        .collect())
}

/// Everything about an evaluation point that does not depend on the
/// coefficients. Reuse it across the fields of many sources.
#[derive(Debug, Clone)]
pub struct PointBasis {
    r: f64,
    theta: f64,
    order: usize,
    factors: Vec<ModeFactors>,
}

impl PointBasis {
    pub fn new(x: &Vec2, order: usize, r_inner: f64, sys: &LameSystem) -> Result<Self> {
        let walls = wall_tables(order, r_inner, sys)?;
        Self::with_walls(x, order, r_inner, &walls, sys)
    }

    fn with_walls(
        x: &Vec2,
        order: usize,
        r_inner: f64,
        walls: &[HankelTable; 2],
        sys: &LameSystem,
    ) -> Result<Self> {
        let (r, theta) = polar(x);
        if !(r > r_inner) {
            return Err(Error::Domain(format!(
                "point ({}, {}) lies inside the expansion disk of radius {r_inner}",
                x.x, x.y
            )));
        }
        Ok(PointBasis {
            r,
            theta,
            order,
            factors: mode_factors(order, r, walls, sys)?,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

/// Truncated Fourier–Bessel field `v_N`, immutable once built.
#[derive(Debug, Clone)]
pub struct ModalField {
    order: usize,
    r_inner: f64,
    rho: f64,
    sys: LameSystem,
    phat_p: Vec<Complex64>,
    phat_s: Vec<Complex64>,
    walls: [HankelTable; 2],
}

impl PartialEq for ModalField {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.r_inner == other.r_inner
            && self.rho == other.rho
            && self.sys == other.sys
            && self.phat_p == other.phat_p
            && self.phat_s == other.phat_s
    }
}

/// The three polar pieces of a field evaluation.
#[derive(Debug, Clone, Copy)]
struct PolarEval {
    value: DisplacementValue,
    d_r: DisplacementValue,
    d_theta: DisplacementValue,
}

fn to_cartesian(radial: Complex64, angular: Complex64, theta: f64) -> DisplacementValue {
    let (er, et) = (e_r(theta), e_theta(theta));
    DisplacementValue::new(radial * er.x + angular * et.x, radial * er.y + angular * et.y)
}

impl ModalField {
    pub fn new(
        order: usize,
        r_inner: f64,
        rho: f64,
        sys: &LameSystem,
        phat_p: Vec<Complex64>,
        phat_s: Vec<Complex64>,
    ) -> Result<Self> {
        sys.validate()?;
        check_radii(rho, r_inner)?;
        if phat_p.len() != 2 * order + 1 || phat_s.len() != 2 * order + 1 {
            return Err(Error::config(
                "coefficients",
                format!("need {} entries per potential", 2 * order + 1),
            ));
        }
        Ok(ModalField {
            order,
            r_inner,
            rho,
            sys: *sys,
            phat_p,
            phat_s,
            walls: wall_tables(order, r_inner, sys)?,
        })
    }

    /// The zero field of a given order.
    pub fn zero(order: usize, r_inner: f64, rho: f64, sys: &LameSystem) -> Result<Self> {
        let z = vec![Complex64::default(); 2 * order + 1];
        Self::new(order, r_inner, rho, sys, z.clone(), z)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn inner_radius(&self) -> f64 {
        self.r_inner
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn sys(&self) -> &LameSystem {
        &self.sys
    }

    /// `(phat_p[n], phat_s[n])`.
    pub fn coefficient(&self, n: i32) -> (Complex64, Complex64) {
        let k = (n + self.order as i32) as usize;
        (self.phat_p[k], self.phat_s[k])
    }

    pub fn coefficients_p(&self) -> &[Complex64] {
        &self.phat_p
    }

    pub fn coefficients_s(&self) -> &[Complex64] {
        &self.phat_s
    }

    /// `(A_n, B_n)` for `n = -N..=N` with
    /// `v_N(r, theta) = sum_n (A_n e_r + B_n e_theta) e^{i n theta}`.
    pub fn polar_modes(&self, r: f64) -> Result<Vec<(Complex64, Complex64)>> {
        let b = self.basis_at(&Vec2::new(r, 0.0))?;
        let n_max = self.order as i32;
        Ok((-n_max..=n_max)
            .enumerate()
            .map(|(k, n)| {
                let f = &b.factors[k];
                let in_r = I * (n as f64 / r);
                let (pp, ps) = (self.phat_p[k], self.phat_s[k]);
                (
                    f.alpha[0] * pp + in_r * f.beta[1] * ps,
                    in_r * f.beta[0] * pp - f.alpha[1] * ps,
                )
            })
            .collect())
    }

    /// Precompute the coefficient-independent part of an evaluation at `x`.
    pub fn basis_at(&self, x: &Vec2) -> Result<PointBasis> {
        PointBasis::with_walls(x, self.order, self.r_inner, &self.walls, &self.sys)
    }

    fn check_basis(&self, b: &PointBasis) -> Result<()> {
        if b.order != self.order {
            return Err(Error::config(
                "basis",
                format!("basis order {} does not match field order {}", b.order, self.order),
            ));
        }
        Ok(())
    }

    fn polar_eval(&self, b: &PointBasis, derivs: bool) -> PolarEval {
        let r = b.r;
        let n_max = self.order as i32;
        let zero = Complex64::default();
        let (mut vr, mut vt) = (zero, zero);
        let (mut rr, mut rt) = (zero, zero);
        let (mut tr, mut tt) = (zero, zero);
        for (k, n) in (-n_max..=n_max).enumerate() {
            let f = &b.factors[k];
            let (pp, ps) = (self.phat_p[k], self.phat_s[k]);
            let in_r = I * (n as f64 / r);
            let a = f.alpha[0] * pp + in_r * f.beta[1] * ps;
            let bb = in_r * f.beta[0] * pp - f.alpha[1] * ps;
            let w = Complex64::from_polar(1.0, n as f64 * b.theta);
            vr += a * w;
            vt += bb * w;
            if derivs {
                let in_ = I * n as f64;
                let da = f.kappa[0] * pp + in_r * (f.alpha[1] - f.beta[1] / r) * ps;
                let db = in_r * (f.alpha[0] - f.beta[0] / r) * pp - f.kappa[1] * ps;
                rr += da * w;
                rt += db * w;
                tr += (in_ * a - bb) * w;
                tt += (a + in_ * bb) * w;
            }
        }
        PolarEval {
            value: to_cartesian(vr, vt, b.theta),
            d_r: to_cartesian(rr, rt, b.theta),
            d_theta: to_cartesian(tr, tt, b.theta),
        }
    }

    pub fn eval_with(&self, b: &PointBasis) -> Result<DisplacementValue> {
        self.check_basis(b)?;
        Ok(self.polar_eval(b, false).value)
    }

    /// Value and Cartesian Jacobian from a precomputed basis.
    pub fn eval_with_gradient(&self, b: &PointBasis) -> Result<(DisplacementValue, CMat2)> {
        self.check_basis(b)?;
        let pe = self.polar_eval(b, true);
        let (c, s) = (b.theta.cos(), b.theta.sin());
        let dx1 = pe.d_r.scale(c) - pe.d_theta.scale(s / b.r);
        let dx2 = pe.d_r.scale(s) + pe.d_theta.scale(c / b.r);
        Ok((pe.value, CMat2::from_columns(&[dx1, dx2])))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModalFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModalFile = serde_json::from_str(text)?;
        let unpack = |v: Vec<[f64; 2]>| v.into_iter().map(|c| Complex64::new(c[0], c[1])).collect();
        ModalField::new(
            f.order,
            f.r_inner,
            f.rho,
            &f.lame,
            unpack(f.coefficients.p),
            unpack(f.coefficients.s),
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModalCoefficients {
    p: Vec<[f64; 2]>,
    s: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModalFile {
    #[serde(rename = "N")]
    order: usize,
    #[serde(rename = "R")]
    r_inner: f64,
    rho: f64,
    lame: LameSystem,
    coefficients: ModalCoefficients,
}

impl From<&ModalField> for ModalFile {
    fn from(mf: &ModalField) -> Self {
        let pack = |v: &[Complex64]| v.iter().map(|c| [c.re, c.im]).collect();
        ModalFile {
            order: mf.order,
            r_inner: mf.r_inner,
            rho: mf.rho,
            lame: mf.sys,
            coefficients: ModalCoefficients {
                p: pack(&mf.phat_p),
                s: pack(&mf.phat_s),
            },
        }
    }
}

fn check_radii(rho: f64, r_inner: f64) -> Result<()> {
    if !(r_inner > 0.0 && r_inner.is_finite()) {
        return Err(Error::config("R", "must be positive"));
    }
    if !(rho > r_inner && rho.is_finite()) {
        return Err(Error::config("R", format!("must be below rho = {rho}")));
    }
    Ok(())
}

/// Trapezoid-rule projections of a full-aperture, equispaced trace.
pub fn modal_rhs(trace: &Trace, order: usize) -> Result<ModalRhs> {
    let m = trace.receivers.len();
    if !trace.is_equispaced_full() {
        return Err(Error::config(
            "aperture",
            "modal projection needs equispaced receivers over the full circle",
        ));
    }
    if order >= m / 2 {
        return Err(Error::Aliasing { order, receivers: m });
    }
    if trace.values.len() != m {
        return Err(Error::config("values", "one value per receiver required"));
    }
    let n_max = order as i32;
    let mut fp = vec![Complex64::default(); 2 * order + 1];
    let mut fs = fp.clone();
    for (th, v) in trace.receivers.iter().zip(&trace.values) {
        let (er, et) = (e_r(*th), e_theta(*th));
        let vr = v[0] * er.x + v[1] * er.y;
        let vt = v[0] * et.x + v[1] * et.y;
        for (k, n) in (-n_max..=n_max).enumerate() {
            let w = Complex64::from_polar(1.0, -(n as f64) * th);
            fp[k] += vr * w;
            fs[k] += vt * w;
        }
    }
    let scale = 1.0 / m as f64;
    fp.iter_mut().chain(fs.iter_mut()).for_each(|c| *c *= scale);
    Ok(ModalRhs { fp, fs })
}

fn single_mode(n: i32, r: f64, r_inner: f64, sys: &LameSystem) -> Result<ModeFactors> {
    let order = n.unsigned_abs() as usize;
    let walls = wall_tables(order, r_inner, sys)?;
    let f = mode_factors(order, r, &walls, sys)?;
    Ok(f[(n + order as i32) as usize])
}

fn matrix_from(n: i32, rho: f64, f: &ModeFactors) -> CMat2 {
    let in_rho = I * (n as f64 / rho);
    CMat2::new(f.alpha[0], in_rho * f.beta[1], in_rho * f.beta[0], -f.alpha[1])
}

/// The 2x2 map from `(phat_p[n], phat_s[n])` to `(f_p[n], f_s[n])` at `r = rho`.
pub fn modal_matrix(n: i32, rho: f64, r_inner: f64, sys: &LameSystem) -> Result<CMat2> {
    sys.validate()?;
    check_radii(rho, r_inner)?;
    Ok(matrix_from(n, rho, &single_mode(n, rho, r_inner, sys)?))
}

/// `n^2 / rho^2 - alpha_p alpha_s / (beta_p beta_s)`, the scaled determinant
/// of [`modal_matrix`].
pub fn lambda_n(n: i32, rho: f64, r_inner: f64, sys: &LameSystem) -> Result<Complex64> {
    sys.validate()?;
    check_radii(rho, r_inner)?;
    let f = single_mode(n, rho, r_inner, sys)?;
    let nf = n as f64;
    Ok(nf * nf / (rho * rho) - f.alpha[0] * f.alpha[1] / (f.beta[0] * f.beta[1]))
}

/// Invert every 2x2 modal system in closed form.
pub fn solve_modal(rhs: &ModalRhs, rho: f64, r_inner: f64, sys: &LameSystem) -> Result<ModalField> {
    sys.validate()?;
    check_radii(rho, r_inner)?;
    let order = rhs.order();
    if rhs.fp.len() != 2 * order + 1 || rhs.fs.len() != rhs.fp.len() {
        return Err(Error::config("rhs", "projection arrays must have length 2N+1"));
    }
    let walls = wall_tables(order, r_inner, sys)?;
    let factors = mode_factors(order, rho, &walls, sys)?;
    let n_max = order as i32;
    let mut phat_p = Vec::with_capacity(2 * order + 1);
    let mut phat_s = Vec::with_capacity(2 * order + 1);
    for (k, n) in (-n_max..=n_max).enumerate() {
        let f = &factors[k];
        let in_rho = I * (n as f64 / rho);
        let bb = f.beta[0] * f.beta[1];
        let nf = n as f64;
        let det = bb * (nf * nf / (rho * rho)) - f.alpha[0] * f.alpha[1];
        if !(det.norm() >= MODAL_DET_FLOOR) {
            return Err(Error::ModalSingular {
                n,
                magnitude: det.norm(),
            });
        }
        let (fp, fs) = (rhs.fp[k], rhs.fs[k]);
        phat_p.push((-f.alpha[1] * fp - in_rho * f.beta[1] * fs) / det);
        phat_s.push((-in_rho * f.beta[0] * fp + f.alpha[0] * fs) / det);
    }
    Ok(ModalField {
        order,
        r_inner,
        rho,
        sys: *sys,
        phat_p,
        phat_s,
        walls,
    })
}

pub fn eval_field(mf: &ModalField, x: &Vec2) -> Result<DisplacementValue> {
    mf.eval_with(&mf.basis_at(x)?)
}

/// `(d v / d r, d v / d theta)` in Cartesian components.
pub fn eval_polar_derivs(mf: &ModalField, x: &Vec2) -> Result<(DisplacementValue, DisplacementValue)> {
    let pe = mf.polar_eval(&mf.basis_at(x)?, true);
    Ok((pe.d_r, pe.d_theta))
}

/// Cartesian Jacobian `m[(i, k)] = d v_i / d x_k`.
pub fn eval_gradient(mf: &ModalField, x: &Vec2) -> Result<CMat2> {
    Ok(mf.eval_with_gradient(&mf.basis_at(x)?)?.1)
}

/// Ridge least-squares fit of the modal coefficients to an arbitrary set of
/// receivers. `reg` is relative to the largest singular value.
pub fn limited_aperture_fit(
    trace: &Trace,
    order: usize,
    r_inner: f64,
    sys: &LameSystem,
    reg: f64,
) -> Result<ModalField> {
    sys.validate()?;
    let rho = trace.rho;
    check_radii(rho, r_inner)?;
    if !(reg >= 0.0) {
        return Err(Error::config("reg", "must be nonnegative"));
    }
    let m = trace.receivers.len();
    let unknowns = 2 * (2 * order + 1);
    if 2 * m < unknowns {
        return Err(Error::config(
            "order",
            format!("{unknowns} unknowns but only {} equations", 2 * m),
        ));
    }
    let walls = wall_tables(order, r_inner, sys)?;
    let factors = mode_factors(order, rho, &walls, sys)?;
    let n_max = order as i32;
    let cols = 2 * order + 1;
    let mut a = DMatrix::<Complex64>::zeros(2 * m, unknowns);
    let mut b = DVector::<Complex64>::zeros(2 * m);
    for (i, (th, v)) in trace.receivers.iter().zip(&trace.values).enumerate() {
        let (er, et) = (e_r(*th), e_theta(*th));
        b[2 * i] = v[0] * er.x + v[1] * er.y;
        b[2 * i + 1] = v[0] * et.x + v[1] * et.y;
        for (k, n) in (-n_max..=n_max).enumerate() {
            let w = Complex64::from_polar(1.0, n as f64 * th);
            let blk = matrix_from(n, rho, &factors[k]) * w;
            a[(2 * i, k)] = blk[(0, 0)];
            a[(2 * i, cols + k)] = blk[(0, 1)];
            a[(2 * i + 1, k)] = blk[(1, 0)];
            a[(2 * i + 1, cols + k)] = blk[(1, 1)];
        }
    }
    let x = LeastSquares::new(a, Regularization::Ridge(reg))?.solve(&b);
    Ok(ModalField {
        order,
        r_inner,
        rho,
        sys: *sys,
        phat_p: x.rows(0, cols).iter().copied().collect(),
        phat_s: x.rows(cols, cols).iter().copied().collect(),
        walls,
    })
}

/// Full-aperture equispaced traces go through the closed-form projection;
/// anything else through [`limited_aperture_fit`].
pub fn extract_modal_field(
    trace: &Trace,
    order: usize,
    r_inner: f64,
    sys: &LameSystem,
    reg: f64,
) -> Result<ModalField> {
    if trace.is_equispaced_full() {
        solve_modal(&modal_rhs(trace, order)?, trace.rho, r_inner, sys)
    } else {
        limited_aperture_fit(trace, order, r_inner, sys, reg)
    }
}

/// How the truncation order follows from the noise level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
#[derive(Default)]
pub enum TruncationRule {
    /// `N = 2 [|ln delta|] + 1`.
    #[default]
    Practical,
    /// `N = [ln(1/delta) / ln tau2]`.
    Theoretical { tau2: f64 },
    /// A fixed order, independent of the noise level.
    Fixed { order: usize },
}


/// The largest integer strictly smaller than `x + 1`.
pub fn bracket(x: f64) -> i64 {
    let y = x + 1.0;
    let f = y.floor();
    (if f == y { f - 1.0 } else { f }) as i64
}

pub fn choose_truncation(delta: f64, rule: TruncationRule) -> Result<usize> {
    if let TruncationRule::Fixed { order } = rule {
        return Ok(order);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!(
            "noise level {delta} outside (0, 1); use a fixed truncation order"
        )));
    }
    let n = match rule {
        TruncationRule::Practical => 2 * bracket(delta.ln().abs()) + 1,
        TruncationRule::Theoretical { tau2 } => {
            if !(tau2 > 1.0) {
                return Err(Error::Domain(format!("tau2 = {tau2} must exceed 1")));
            }
            bracket((1.0 / delta).ln() / tau2.ln())
        }
        TruncationRule::Fixed { .. } => unreachable!(),
    };
    Ok(n.max(0) as usize)
}
