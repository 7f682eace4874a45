//! Second-order smoothing splines on [0, 1].
//!
//! [`fit`] solves the penalised least-squares problem through a banded O(n)
//! system in Reinsch form. [`dense`] builds the same estimator from the
//! reproducing kernel of the second-order Sobolev space with dense linear
//! algebra; it is the independent reference route used by the validation suite.

mod banded;
pub mod dense;
mod model;
mod smoother;

pub use model::SplineModel;
pub use smoother::{HatMatrix, SmoothingOperator};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Abscissae and ordinates for a scalar regression problem on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData<T> {
    points: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> RegressionData<T> {
    pub fn new(points: Vec<T>, values: Vec<T>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::LengthMismatch {
                points: points.len(),
                values: values.len(),
            });
        }
        validate_points(&points)?;
        Ok(RegressionData { points, values })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest gap, counting the gaps to the domain ends 0 and 1.
    pub fn max_gap(&self) -> T {
        let n = self.points.len();
        let inner = self
            .points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::zero(), T::max);
        inner.max(self.points[0]).max(T::one() - self.points[n - 1])
    }

    /// Smallest gap between consecutive points.
    pub fn min_gap(&self) -> T {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::infinity(), T::min)
    }
}

pub(crate) fn validate_points<T: Real>(points: &[T]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            required: 3,
            actual: points.len(),
        });
    }
    if let Some(bad) = points.iter().find(|&&t| !(t >= T::zero() && t <= T::one())) {
        return Err(Error::InvalidAbscissae(format!(
            "point {bad} outside [0, 1]"
        )));
    }
    if let Some(i) = points.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidAbscissae(format!(
            "points {} and {} at index {i} are not strictly increasing",
            points[i],
            points[i + 1]
        )));
    }
    Ok(())
}

/// Smoothing-spline fit with parameter `lambda > 0`.
pub fn fit<T: Real>(data: &RegressionData<T>, lambda: T) -> Result<SplineModel<T>> {
    SmoothingOperator::new(data.points(), lambda)?.fit(data.values())
}

/// Natural cubic interpolating spline through the data.
pub fn interpolate<T: Real>(data: &RegressionData<T>) -> Result<SplineModel<T>> {
    SmoothingOperator::interpolating(data.points())?.fit(data.values())
}

pub fn evaluate<T: Real>(model: &SplineModel<T>, x: T) -> Result<T> {
    model.evaluate(x)
}

pub fn derivative<T: Real>(model: &SplineModel<T>, x: T, order: usize) -> Result<T> {
    match order {
        1 | 2 => model.derivative(x, order),
        _ => Err(Error::Unsupported(format!("derivative order {order}"))),
    }
}

pub fn hat_matrix<T: Real>(points: &[T], lambda: T) -> Result<HatMatrix<T>> {
    SmoothingOperator::new(points, lambda)?.hat_matrix()
}

/// `G_{n,lambda}(x, t_i)`: `n` times the value at `x` of the fit to the `i`-th unit vector.
pub fn weight_function<T: Real>(points: &[T], lambda: T, x: T, i: usize) -> Result<T> {
    SmoothingOperator::new(points, lambda)?.weight(x, i)
}

#[cfg(test)]
mod tests;
