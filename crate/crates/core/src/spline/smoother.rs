//! Reinsch-form smoothing spline solver with a reusable factorisation.

use super::banded::{BandedLdl, Pentadiagonal};
use super::model::{check_domain, SplineModel};
use super::validate_points;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smoothing-spline fit operator for fixed abscissae and smoothing parameter.
///
/// Minimises `(1/n) sum (g(t_i) - y_i)^2 + lambda ∫ (g'')^2` over natural cubic
/// splines with knots at the abscissae. With `alpha = n * lambda` and `R = UᵀU`,
/// `w = alpha * gamma` (gamma the interior second derivatives) is the least-squares
/// solution of `[Q; U / sqrt(alpha)] w ≈ [y; 0]`, and the fitted values are `y - Q w`.
/// The stacked system is reduced with Givens rotations instead of forming
/// `R + alpha QᵀQ`, which keeps full accuracy when some knots nearly coincide.
///
/// The factorisation is computed once, so fitting many data vectors on the same
/// abscissae (vector-valued responses, hat matrices, weight functions) costs O(n) each.
#[derive(Debug, Clone)]
pub struct SmoothingOperator<T> {
    points: Vec<T>,
    lambda: T,
    alpha: T,
    // Q column entries for interior knot k = j + 1: rows k-1, k, k+1.
    q: Vec<[T; 3]>,
    solver: Solver<T>,
}

#[derive(Debug, Clone)]
enum Solver<T> {
    Interpolate(Option<BandedLdl<T>>),
    Smooth(BandedQr<T>),
}

impl<T: Real> SmoothingOperator<T> {
    /// Prepares the operator; `lambda > 0` is a smoothing fit.
    pub fn new(points: &[T], lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidLambda(lambda.to_f64().unwrap_or(f64::NAN)));
        }
        Self::build(points, lambda)
    }

    /// Prepares the natural cubic interpolation operator (the `lambda -> 0` limit).
    pub fn interpolating(points: &[T]) -> Result<Self> {
        Self::build(points, T::zero())
    }

    fn build(points: &[T], lambda: T) -> Result<Self> {
        validate_points(points)?;
        let n = points.len();
        let m = n - 2;
        let h: Vec<T> = points.windows(2).map(|w| w[1] - w[0]).collect();
        let alpha = lambda * T::from_usize_lossy(n);
        let q: Vec<[T; 3]> = (0..m)
            .map(|j| {
                let (hl, hr) = (h[j], h[j + 1]);
                [
                    T::one() / hl,
                    -(T::one() / hl + T::one() / hr),
                    T::one() / hr,
                ]
            })
            .collect();

        let (three, six) = (T::lit(3.0), T::lit(6.0));
        let r_diag: Vec<T> = (0..m).map(|j| (h[j] + h[j + 1]) / three).collect();
        let r_off: Vec<T> = (0..m.saturating_sub(1)).map(|j| h[j + 1] / six).collect();

        let solver = if alpha > T::zero() {
            Solver::Smooth(BandedQr::new(&q, &r_diag, &r_off, alpha)?)
        } else {
            let mut sys = Pentadiagonal::zeros(m);
            sys.diag.copy_from_slice(&r_diag);
            sys.sub1.copy_from_slice(&r_off);
            Solver::Interpolate(if m > 0 { Some(sys.factor()?) } else { None })
        };
        Ok(SmoothingOperator {
            points: points.to_vec(),
            lambda,
            alpha,
            q,
            solver,
        })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn fit(&self, values: &[T]) -> Result<SplineModel<T>> {
        let n = self.points.len();
        if values.len() != n {
            return Err(Error::LengthMismatch {
                points: n,
                values: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure("non-finite data value".into()));
        }
        let m = n - 2;
        let model = match &self.solver {
            Solver::Interpolate(ldl) => {
                let qty: Vec<T> = (0..m)
                    .map(|j| {
                        let q = self.q[j];
                        q[0] * values[j] + q[1] * values[j + 1] + q[2] * values[j + 2]
                    })
                    .collect();
                let gamma = match ldl {
                    Some(ldl) => ldl.solve(&qty),
                    None => Vec::new(),
                };
                let mut second = vec![T::zero(); n];
                second[1..=m].copy_from_slice(&gamma);
                SplineModel::from_parts(self.points.clone(), values.to_vec(), second, self.lambda)
            }
            Solver::Smooth(qr) => {
                let w = qr.solve(values);
                // Residuals y - g = Q w = alpha c.
                let mut resid = vec![T::zero(); n];
                for (j, &wj) in w.iter().enumerate() {
                    let q = self.q[j];
                    resid[j] = resid[j] + q[0] * wj;
                    resid[j + 1] = resid[j + 1] + q[1] * wj;
                    resid[j + 2] = resid[j + 2] + q[2] * wj;
                }
                let fitted: Vec<T> = values.iter().zip(&resid).map(|(&y, &r)| y - r).collect();
                let coef: Vec<T> = resid.iter().map(|&r| r / self.alpha).collect();
                let mut second = vec![T::zero(); n];
                for (j, &wj) in w.iter().enumerate() {
                    second[j + 1] = wj / self.alpha;
                }
                SplineModel::from_parts_with_kernel(
                    self.points.clone(),
                    fitted,
                    second,
                    self.lambda,
                    coef,
                )
            }
        };
        let finite = model
            .fitted()
            .iter()
            .chain(model.second_derivatives())
            .chain(model.coef_kernel())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::NumericalFailure(
                "non-finite spline coefficients".into(),
            ));
        }
        Ok(model)
    }

    /// Hat matrix `A_lambda`; column `j` holds the fitted knot values for the `j`-th unit vector.
    pub fn hat_matrix(&self) -> Result<HatMatrix<T>> {
        let n = self.points.len();
        let mut entries = vec![T::zero(); n * n];
        let mut unit = vec![T::zero(); n];
        for j in 0..n {
            unit[j] = T::one();
            let model = self.fit(&unit)?;
            for (i, &v) in model.fitted().iter().enumerate() {
                entries[i * n + j] = v;
            }
            unit[j] = T::zero();
        }
        Ok(HatMatrix { n, entries })
    }

    /// Unit-impulse fit for knot `i`; `n` times its value at `x` is `G_{n,lambda}(x, t_i)`.
    pub fn impulse_response(&self, i: usize) -> Result<SplineModel<T>> {
        let n = self.points.len();
        if i >= n {
            return Err(Error::Unsupported(format!("knot index {i} >= {n}")));
        }
        let mut unit = vec![T::zero(); n];
        unit[i] = T::one();
        self.fit(&unit)
    }

    /// Weight function `G_{n,lambda}(x, t_i)` so that `u(x) = (1/n) sum_i G(x, t_i) y_i`.
    pub fn weight(&self, x: T, i: usize) -> Result<T> {
        check_domain(x)?;
        let g = self.impulse_response(i)?;
        Ok(T::from_usize_lossy(self.points.len()) * g.value_at(x))
    }
}

/// Dense `n × n` matrix mapping data values to fitted values at the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct HatMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Real> HatMatrix<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    pub fn apply(&self, z: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(z)
                    .map(|(&a, &b)| a * b)
                    .fold(T::zero(), |s, v| s + v)
            })
            .collect()
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// One Givens rotation mixing factor row `row` with the incoming row.
#[derive(Debug, Clone, Copy)]
struct Rotation<T> {
    row: usize,
    c: T,
    s: T,
}

/// Banded QR factor of `[Q; U / sqrt(alpha)]` with the rotation sequence kept for replay.
#[derive(Debug, Clone)]
struct BandedQr<T> {
    // Upper-triangular factor, row k holding columns k, k + 1, k + 2.
    r: Vec<[T; 3]>,
    // Per incoming row: data index (None for penalty rows) and the end of its rotations.
    rows: Vec<(Option<usize>, usize)>,
    rotations: Vec<Rotation<T>>,
}

impl<T: Real> BandedQr<T> {
    fn new(q: &[[T; 3]], r_diag: &[T], r_off: &[T], alpha: T) -> Result<Self> {
        let m = q.len();
        let mut qr = BandedQr {
            r: vec![[T::zero(); 3]; m],
            rows: Vec::with_capacity(2 * m + 2),
            rotations: Vec::with_capacity(6 * m + 6),
        };
        if m == 0 {
            return Ok(qr);
        }
        // Bidiagonal Cholesky factor of the tridiagonal R, scaled by 1 / sqrt(alpha).
        let inv_sqrt = T::one() / alpha.sqrt();
        let mut u = vec![[T::zero(); 2]; m];
        let mut carry = T::zero();
        for j in 0..m {
            let d = r_diag[j] - carry * carry;
            if !(d > T::zero()) {
                return Err(Error::NumericalFailure(format!(
                    "non-positive pivot at row {j}"
                )));
            }
            let ujj = d.sqrt();
            carry = if j + 1 < m { r_off[j] / ujj } else { T::zero() };
            u[j] = [ujj * inv_sqrt, carry * inv_sqrt];
        }
        let mut filled = vec![false; m];
        let q_row = |i: usize| {
            let start = i.saturating_sub(2);
            let mut vals = [T::zero(); 3];
            for (k, v) in vals.iter_mut().enumerate() {
                let col = start + k;
                if col < m && i >= col && i - col <= 2 {
                    *v = q[col][i - col];
                }
            }
            (start, vals)
        };
        #[allow(clippy::needless_range_loop)]
        for col in 0..m {
            let data_rows = if col == 0 { 0..3 } else { col + 2..col + 3 };
            for i in data_rows {
                let (start, vals) = q_row(i);
                qr.absorb(start, vals, &mut filled);
                qr.rows.push((Some(i), qr.rotations.len()));
            }
            qr.absorb(col, [u[col][0], u[col][1], T::zero()], &mut filled);
            qr.rows.push((None, qr.rotations.len()));
        }
        let scale = qr.r.iter().map(|r| r[0].abs()).fold(T::zero(), T::max);
        let tol = scale * T::epsilon() * T::from_usize_lossy(m);
        if let Some(k) = qr.r.iter().position(|r| !(r[0].abs() > tol)) {
            return Err(Error::NumericalFailure(format!(
                "rank-deficient smoothing system at column {k}"
            )));
        }
        Ok(qr)
    }

    fn absorb(&mut self, start: usize, mut vals: [T; 3], filled: &mut [bool]) {
        let m = self.r.len();
        let mut k = start;
        while k < m && vals.iter().any(|v| *v != T::zero()) {
            if !filled[k] {
                self.r[k] = vals;
                filled[k] = true;
                self.rotations.push(Rotation {
                    row: k,
                    c: T::zero(),
                    s: T::one(),
                });
                return;
            }
            if vals[0] != T::zero() {
                let a = self.r[k][0];
                let rho = a.hypot(vals[0]);
                let (c, s) = (a / rho, vals[0] / rho);
                for (rj, vj) in self.r[k].iter_mut().zip(vals.iter_mut()) {
                    let (x, y) = (*rj, *vj);
                    *rj = c * x + s * y;
                    *vj = c * y - s * x;
                }
                self.rotations.push(Rotation { row: k, c, s });
            }
            vals = [vals[1], vals[2], T::zero()];
            k += 1;
        }
    }

    /// Least-squares solution for right-hand side `[y; 0]`.
    fn solve(&self, y: &[T]) -> Vec<T> {
        let m = self.r.len();
        let mut z = vec![T::zero(); m];
        let mut at = 0;
        for &(source, end) in &self.rows {
            let mut beta = source.map_or(T::zero(), |i| y[i]);
            for rot in &self.rotations[at..end] {
                let zk = z[rot.row];
                z[rot.row] = rot.c * zk + rot.s * beta;
                beta = rot.c * beta - rot.s * zk;
            }
            at = end;
        }
        let mut w = vec![T::zero(); m];
        for k in (0..m).rev() {
            let mut acc = z[k];
            if k + 1 < m {
                acc = acc - self.r[k][1] * w[k + 1];
            }
            if k + 2 < m {
                acc = acc - self.r[k][2] * w[k + 2];
            }
            w[k] = acc / self.r[k][0];
        }
        w
    }
}
