//! Dense least squares through the SVD, with truncation or Tikhonov damping.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};

/// How small singular values are treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    /// Drop singular values below `rel * sigma_max`.
    Truncate(f64),
    /// Tikhonov damping with parameter `rel * sigma_max`. A zero weight
    /// means plain least squares and fails on a numerically rank-deficient
    /// matrix.
    Ridge(f64),
}

/// A factored least-squares problem `min |A x - b|`, reusable across many
/// right-hand sides.
#[derive(Debug, Clone)]
pub struct LeastSquares<T: ComplexField<RealField = f64>> {
    u_adj: DMatrix<T>,
    v: DMatrix<T>,
    filter: DVector<f64>,
    sigma_max: f64,
}

const RANK_TOL: f64 = 1e-14;

impl<T: ComplexField<RealField = f64>> LeastSquares<T> {
    pub fn new(a: DMatrix<T>, reg: Regularization) -> Result<Self> {
        let (rows, cols) = a.shape();
        if rows == 0 || cols == 0 {
            return Err(Error::Solve("empty system".into()));
        }
        if a.iter().any(|v| !v.clone().is_finite()) {
            return Err(Error::Solve("system matrix has non-finite entries".into()));
        }
        let svd = a.svd(true, true);
        let u = svd.u.ok_or_else(|| Error::Solve("SVD did not converge".into()))?;
        let v_t = svd.v_t.ok_or_else(|| Error::Solve("SVD did not converge".into()))?;
        let sigma = svd.singular_values;
        let sigma_max = sigma.max();
        if sigma_max == 0.0 {
            return Err(Error::Solve("zero matrix".into()));
        }
        let filter = match reg {
            Regularization::Truncate(rel) => {
                sigma.map(|s| if s > rel * sigma_max { 1.0 / s } else { 0.0 })
            }
            Regularization::Ridge(rel) if rel > 0.0 => {
                let lam2 = (rel * sigma_max).powi(2);
                sigma.map(|s| s / (s * s + lam2))
            }
            Regularization::Ridge(_) => {
                let smin = sigma.min();
                if rows < cols || smin <= RANK_TOL * sigma_max {
                    return Err(Error::Solve(format!(
                        "rank-deficient system (sigma_min / sigma_max = {:e})",
                        smin / sigma_max
                    )));
                }
                sigma.map(|s| 1.0 / s)
            }
        };
        Ok(LeastSquares {
            u_adj: u.adjoint(),
            v: v_t.adjoint(),
            filter,
            sigma_max,
        })
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    pub fn solve(&self, b: &DVector<T>) -> DVector<T> {
        let mut coeffs = &self.u_adj * b;
        for (c, f) in coeffs.iter_mut().zip(self.filter.iter()) {
            *c = c.clone().scale(*f);
        }
        &self.v * coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn exact_solution_recovered() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, -1.0]);
        let x = DVector::from_vec(vec![0.5, -2.0]);
        let b = &a * &x;
        let ls = LeastSquares::new(a, Regularization::Ridge(0.0)).unwrap();
        assert!((ls.solve(&b) - x).norm() < 1e-13);
    }

    #[test]
    fn complex_truncated_solve() {
        let a = DMatrix::from_fn(6, 3, |i, j| Complex64::new((i + 2 * j) as f64, (i * j) as f64 - 1.0));
        let x = DVector::from_fn(3, |i, _| Complex64::new(1.0 + i as f64, -0.5));
        let b = &a * &x;
        let ls = LeastSquares::new(a, Regularization::Truncate(1e-12)).unwrap();
        assert!((ls.solve(&b) - x).norm() < 1e-12);
    }

    #[test]
    fn rank_deficient_without_damping_fails() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        assert!(LeastSquares::new(a.clone(), Regularization::Ridge(0.0)).is_err());
        assert!(LeastSquares::new(a, Regularization::Ridge(1e-8)).is_ok());
    }

    #[test]
    fn heavy_damping_shrinks_to_zero() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let ls = LeastSquares::new(a, Regularization::Ridge(1e8)).unwrap();
        assert!(ls.solve(&b).norm() < 1e-14);
    }
}
