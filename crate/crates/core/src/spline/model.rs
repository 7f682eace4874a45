use crate::error::{Error, Result};
use crate::scalar::Real;

/// A natural cubic spline on [0, 1], as produced by a second-order smoothing-spline fit.
///
/// Stored in value/second-derivative form at the knots; the second derivative is
/// piecewise linear, vanishes at the outer knots, and the spline is linear outside
/// `[t_1, t_n]`. The equivalent representation
/// `u(x) = d_1 + d_2 x + sum_j c_j phi0(x, t_j)` is available through
/// [`coef_poly`](Self::coef_poly) and [`coef_kernel`](Self::coef_kernel).
#[derive(Debug, Clone, PartialEq)]
pub struct SplineModel<T> {
    knots: Vec<T>,
    values: Vec<T>,
    second: Vec<T>,
    lambda: T,
    coef_poly: [T; 2],
    coef_kernel: Vec<T>,
}

impl<T: Real> SplineModel<T> {
    /// Builds a model from knot values and second derivatives. `second` must be zero at both ends.
    pub(crate) fn from_parts(knots: Vec<T>, values: Vec<T>, second: Vec<T>, lambda: T) -> Self {
        let n = knots.len();
        let mut model = SplineModel {
            knots,
            values,
            second,
            lambda,
            coef_poly: [T::zero(); 2],
            coef_kernel: vec![T::zero(); n],
        };
        // c_j is the jump of u''' at t_j; u''' vanishes outside [t_1, t_n].
        let mut prev = T::zero();
        for j in 0..n {
            let next = if j + 1 < n {
                model.third_on(j)
            } else {
                T::zero()
            };
            model.coef_kernel[j] = next - prev;
            prev = next;
        }
        // phi0(0, .) and its first derivative vanish at 0, leaving the null-space part.
        model.coef_poly = [model.value_at(T::zero()), model.slope_at(T::zero())];
        model
    }

    /// The line through two points; every fit on two distinct points reduces to it.
    pub(crate) fn line(knots: Vec<T>, values: Vec<T>, lambda: T) -> Self {
        Self::from_parts(knots, values, vec![T::zero(); 2], lambda)
    }

    /// Like [`from_parts`](Self::from_parts) but with the kernel coefficients supplied
    /// directly, avoiding divided differences over very short intervals.
    pub(crate) fn from_parts_with_kernel(
        knots: Vec<T>,
        values: Vec<T>,
        second: Vec<T>,
        lambda: T,
        coef_kernel: Vec<T>,
    ) -> Self {
        let n = knots.len();
        // u(t_k) - sum_j c_j phi0(t_k, t_j) = d_1 + d_2 t_k at the two outer knots.
        let rest = |k: usize| {
            let tk = knots[k];
            let s = knots
                .iter()
                .zip(&coef_kernel)
                .map(|(&tj, &cj)| cj * super::dense::phi0(tk, tj))
                .fold(T::zero(), |a, b| a + b);
            values[k] - s
        };
        let (r0, r1) = (rest(0), rest(n - 1));
        let d2 = (r1 - r0) / (knots[n - 1] - knots[0]);
        let d1 = r0 - d2 * knots[0];
        SplineModel {
            knots,
            values,
            second,
            lambda,
            coef_poly: [d1, d2],
            coef_kernel,
        }
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    /// Fitted values at the knots.
    pub fn fitted(&self) -> &[T] {
        &self.values
    }

    /// Second derivatives at the knots.
    pub fn second_derivatives(&self) -> &[T] {
        &self.second
    }

    /// Smoothing parameter; zero for an interpolating spline.
    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Penalty order, always 2.
    pub fn order(&self) -> usize {
        2
    }

    /// Coefficients `d` of the null-space basis `{1, t}`.
    pub fn coef_poly(&self) -> [T; 2] {
        self.coef_poly
    }

    /// Coefficients `c` of the kernel sections `phi0(., t_j)`.
    pub fn coef_kernel(&self) -> &[T] {
        &self.coef_kernel
    }

    pub fn evaluate(&self, x: T) -> Result<T> {
        check_domain(x)?;
        Ok(self.value_at(x))
    }

    /// Analytic first or second derivative.
    pub fn derivative(&self, x: T, order: usize) -> Result<T> {
        check_domain(x)?;
        match order {
            0 => Ok(self.value_at(x)),
            1 => Ok(self.slope_at(x)),
            2 => Ok(self.curvature_at(x)),
            _ => Err(Error::Unsupported(format!("derivative of order {order}"))),
        }
    }

    /// `∫_0^1 (u'')^2`, exact for the piecewise-linear second derivative.
    pub fn roughness(&self) -> T {
        let three = T::lit(3.0);
        self.knots
            .windows(2)
            .zip(self.second.windows(2))
            .map(|(t, g)| (t[1] - t[0]) / three * (g[0] * g[0] + g[0] * g[1] + g[1] * g[1]))
            .fold(T::zero(), |a, b| a + b)
    }

    /// Penalised least-squares objective `(1/n) sum (u(t_i) - y_i)^2 + lambda ∫ (u'')^2`
    /// evaluated for this model against arbitrary data.
    pub fn objective(&self, points: &[T], values: &[T], lambda: T) -> T {
        let n = T::from_usize_lossy(points.len());
        let rss = points
            .iter()
            .zip(values)
            .map(|(&t, &y)| {
                let r = self.value_at(t) - y;
                r * r
            })
            .fold(T::zero(), |a, b| a + b);
        rss / n + lambda * self.roughness()
    }

    // Index i of the interval [t_i, t_{i+1}] containing x, clamped to the outer intervals.
    fn interval(&self, x: T) -> usize {
        let n = self.knots.len();
        let p = self.knots.partition_point(|&t| t <= x);
        p.clamp(1, n - 1) - 1
    }

    fn third_on(&self, i: usize) -> T {
        (self.second[i + 1] - self.second[i]) / (self.knots[i + 1] - self.knots[i])
    }

    fn end_slopes(&self) -> (T, T) {
        let n = self.knots.len();
        let six = T::lit(6.0);
        let three = T::lit(3.0);
        let h0 = self.knots[1] - self.knots[0];
        let left = (self.values[1] - self.values[0]) / h0
            - h0 * (self.second[0] / three + self.second[1] / six);
        let hn = self.knots[n - 1] - self.knots[n - 2];
        let right = (self.values[n - 1] - self.values[n - 2]) / hn
            + hn * (self.second[n - 2] / six + self.second[n - 1] / three);
        (left, right)
    }

    pub(crate) fn value_at(&self, x: T) -> T {
        let n = self.knots.len();
        if x < self.knots[0] {
            let (left, _) = self.end_slopes();
            return self.values[0] + left * (x - self.knots[0]);
        }
        if x > self.knots[n - 1] {
            let (_, right) = self.end_slopes();
            return self.values[n - 1] + right * (x - self.knots[n - 1]);
        }
        let i = self.interval(x);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - x) / h;
        let b = (x - self.knots[i]) / h;
        let six = T::lit(6.0);
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / six
    }

    pub(crate) fn slope_at(&self, x: T) -> T {
        let n = self.knots.len();
        if x < self.knots[0] {
            return self.end_slopes().0;
        }
        if x > self.knots[n - 1] {
            return self.end_slopes().1;
        }
        let i = self.interval(x);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - x) / h;
        let b = (x - self.knots[i]) / h;
        let (one, three, six) = (T::one(), T::lit(3.0), T::lit(6.0));
        (self.values[i + 1] - self.values[i]) / h - (three * a * a - one) / six * h * self.second[i]
            + (three * b * b - one) / six * h * self.second[i + 1]
    }

    pub(crate) fn curvature_at(&self, x: T) -> T {
        let n = self.knots.len();
        if x <= self.knots[0] || x >= self.knots[n - 1] {
            return T::zero();
        }
        let i = self.interval(x);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - x) / h;
        let b = (x - self.knots[i]) / h;
        a * self.second[i] + b * self.second[i + 1]
    }
}

pub(crate) fn check_domain<T: Real>(x: T) -> Result<()> {
    if x >= T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(Error::OutOfDomain(x.to_f64().unwrap_or(f64::NAN)))
    }
}
