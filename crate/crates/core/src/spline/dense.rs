//! Dense reproducing-kernel construction of the smoothing spline.
//!
//! With `phi0` the kernel of `{g : g(0) = g'(0) = 0}` under `∫ (g'')^2`, the fit is
//! `u(x) = d_1 + d_2 x + sum_j c_j phi0(x, t_j)` where, for `L = Σ + n lambda I`,
//!
//! ```text
//! d = (Pᵀ L⁻¹ P)⁻¹ Pᵀ L⁻¹ y
//! c = L⁻¹ (I - P (Pᵀ L⁻¹ P)⁻¹ Pᵀ L⁻¹) y
//! ```
//!
//! Everything here is O(n³) and exists to cross-check the banded solver.

use super::validate_points;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// `∫_0^1 (t - x)_+ (s - x)_+ dx`, the kernel of the second-order space with
/// vanishing value and slope at 0.
pub fn phi0<T: Real>(t: T, s: T) -> T {
    let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
    if lo <= T::zero() {
        return T::zero();
    }
    lo * lo * hi / T::lit(2.0) - lo * lo * lo / T::lit(6.0)
}

/// Reproducing kernel `1 + t s + phi0(t, s)` of the second-order Sobolev space
/// normed by `g(0)^2 + g'(0)^2 + ∫ (g'')^2`.
pub fn reproducing_kernel<T: Real>(t: T, s: T) -> T {
    T::one() + t * s + phi0(t, s)
}

/// Smoothing spline in kernel form, solved with dense linear algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSpline<T> {
    knots: Vec<T>,
    coef_poly: [T; 2],
    coef_kernel: Vec<T>,
}

impl<T: Real> DenseSpline<T> {
    pub fn fit(points: &[T], values: &[T], lambda: T) -> Result<Self> {
        validate_points(points)?;
        if points.len() != values.len() {
            return Err(Error::LengthMismatch {
                points: points.len(),
                values: values.len(),
            });
        }
        check_lambda(lambda)?;
        let n = points.len();
        let p = null_space_design(points);
        let l = gram(points).add(&Matrix::identity(n).scale(T::from_usize_lossy(n) * lambda));

        let mut rhs = Matrix::zeros(n, 3);
        for i in 0..n {
            rhs[(i, 0)] = p[(i, 0)];
            rhs[(i, 1)] = p[(i, 1)];
            rhs[(i, 2)] = values[i];
        }
        let sol = l.solve(&rhs)?;
        let linv_p = Matrix::from_fn(n, 2, |i, j| sol[(i, j)]);
        let linv_y = Matrix::column(&sol.col(2));

        let pt = p.transpose();
        let m = pt.matmul(&linv_p);
        let d = m.solve(&pt.matmul(&linv_y))?;
        let c = linv_y.sub(&linv_p.matmul(&d));
        Ok(DenseSpline {
            knots: points.to_vec(),
            coef_poly: [d[(0, 0)], d[(1, 0)]],
            coef_kernel: c.col(0),
        })
    }

    pub fn coef_poly(&self) -> [T; 2] {
        self.coef_poly
    }

    pub fn coef_kernel(&self) -> &[T] {
        &self.coef_kernel
    }

    pub fn evaluate(&self, x: T) -> T {
        self.knots.iter().zip(&self.coef_kernel).fold(
            self.coef_poly[0] + self.coef_poly[1] * x,
            |acc, (&t, &c)| acc + c * phi0(x, t),
        )
    }

    /// Fitted values at the knots.
    pub fn fitted(&self) -> Vec<T> {
        self.knots.iter().map(|&t| self.evaluate(t)).collect()
    }
}

/// Hat matrix `A = P M1 + Σ M2` with `M1 = (Pᵀ L⁻¹ P)⁻¹ Pᵀ L⁻¹` and
/// `M2 = L⁻¹ (I - P M1)`, i.e. the kernel-form fit evaluated at the knots.
pub fn dense_hat_matrix<T: Real>(points: &[T], lambda: T) -> Result<Matrix<T>> {
    validate_points(points)?;
    check_lambda(lambda)?;
    let n = points.len();
    let p = null_space_design(points);
    let sigma = gram(points);
    let l = sigma.add(&Matrix::identity(n).scale(T::from_usize_lossy(n) * lambda));
    let linv = l.solve(&Matrix::identity(n))?;
    let pt = p.transpose();
    let pt_linv = pt.matmul(&linv);
    let m1 = pt_linv.matmul(&p).solve(&pt_linv)?;
    let m2 = linv.matmul(&Matrix::identity(n).sub(&p.matmul(&m1)));
    Ok(p.matmul(&m1).add(&sigma.matmul(&m2)))
}

/// `A = Q (QᵀQ + n lambda Γ)⁻¹ Qᵀ` with `Q = [P Σ]` and `Γ = diag(0, Σ)`.
///
/// The factor `n` puts the penalty on the same scale as the `(1/n)`-weighted
/// residual sum. The normal matrix squares the conditioning of `Σ`, so this form
/// is only usable for a handful of points; [`dense_hat_matrix`] is the stable route.
pub fn normal_equations_hat_matrix<T: Real>(points: &[T], lambda: T) -> Result<Matrix<T>> {
    validate_points(points)?;
    check_lambda(lambda)?;
    let n = points.len();
    let p = null_space_design(points);
    let sigma = gram(points);
    let q = Matrix::from_fn(
        n,
        n + 2,
        |i, j| if j < 2 { p[(i, j)] } else { sigma[(i, j - 2)] },
    );
    let gamma = Matrix::from_fn(n + 2, n + 2, |i, j| {
        if i < 2 || j < 2 {
            T::zero()
        } else {
            sigma[(i - 2, j - 2)]
        }
    });
    let qt = q.transpose();
    let normal = qt
        .matmul(&q)
        .add(&gamma.scale(T::from_usize_lossy(n) * lambda));
    let coef = normal.solve(&qt)?;
    Ok(q.matmul(&coef))
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if lambda > T::zero() && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda.to_f64().unwrap_or(f64::NAN)))
    }
}

fn null_space_design<T: Real>(points: &[T]) -> Matrix<T> {
    Matrix::from_fn(
        points.len(),
        2,
        |i, j| if j == 0 { T::one() } else { points[i] },
    )
}

fn gram<T: Real>(points: &[T]) -> Matrix<T> {
    Matrix::from_fn(points.len(), points.len(), |i, j| {
        phi0(points[i], points[j])
    })
}
