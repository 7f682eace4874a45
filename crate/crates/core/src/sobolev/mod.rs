//! Sobolev norms on [0, 1], equivalent kernels of the smoothing spline, and
//! numerical checks of the inequalities relating them.

mod kernel;
mod norms;

pub use kernel::{
    check_kernel_bound, check_kernel_weight_convergence, kernel_k, kernel_silverman,
    weight_kernel_gap, ConvergenceReport, KernelBoundReport,
};
pub use norms::{
    check_interpolation_inequality, check_norm_equivalence, full_sobolev_norm_sq, lp_norm,
    norm_equivalence_corpus, simpson, sobolev_eq_norm_sq, InterpolationReport,
    NormEquivalenceReport,
};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spline::SplineModel;
use crate::tolerance::FD_STEP;

type RealFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A real function on [0, 1] with optional analytic first and second derivatives.
///
/// Missing derivatives are replaced by finite differences with step
/// [`FD_STEP`]; near the ends of the interval the stencil becomes one-sided so
/// the function is never evaluated outside [0, 1].
#[derive(Clone)]
pub struct FunctionHandle<T> {
    eval: RealFn<T>,
    deriv1: Option<RealFn<T>>,
    deriv2: Option<RealFn<T>>,
}

impl<T> fmt::Debug for FunctionHandle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("deriv1", &self.deriv1.is_some())
            .field("deriv2", &self.deriv2.is_some())
            .finish()
    }
}

impl<T: Real> FunctionHandle<T> {
    pub fn new(eval: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        FunctionHandle {
            eval: Arc::new(eval),
            deriv1: None,
            deriv2: None,
        }
    }

    pub fn with_first(mut self, d1: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.deriv1 = Some(Arc::new(d1));
        self
    }

    pub fn with_second(mut self, d2: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.deriv2 = Some(Arc::new(d2));
        self
    }

    /// Wraps a fitted spline with its analytic derivatives.
    pub fn from_spline(model: SplineModel<T>) -> Self {
        let m = Arc::new(model);
        let (m0, m1, m2) = (m.clone(), m.clone(), m);
        FunctionHandle::new(move |x| m0.value_at(x))
            .with_first(move |x| m1.slope_at(x))
            .with_second(move |x| m2.curvature_at(x))
    }

    /// `c * f`, keeping whatever derivatives `f` has.
    pub fn scaled(&self, c: T) -> Self {
        let e = self.eval.clone();
        let mut out = FunctionHandle::new(move |x| c * e(x));
        if let Some(d) = self.deriv1.clone() {
            out.deriv1 = Some(Arc::new(move |x| c * d(x)));
        }
        if let Some(d) = self.deriv2.clone() {
            out.deriv2 = Some(Arc::new(move |x| c * d(x)));
        }
        out
    }

    pub fn eval(&self, x: T) -> T {
        (self.eval)(x)
    }

    pub fn has_analytic(&self, order: usize) -> bool {
        match order {
            0 => true,
            1 => self.deriv1.is_some(),
            2 => self.deriv2.is_some(),
            _ => false,
        }
    }

    /// Derivative of order 0, 1 or 2 at `x`.
    pub fn derivative(&self, x: T, order: usize) -> Result<T> {
        match order {
            0 => Ok(self.eval(x)),
            1 => Ok(match &self.deriv1 {
                Some(d) => d(x),
                None => first_difference(&*self.eval, x),
            }),
            2 => Ok(match (&self.deriv2, &self.deriv1) {
                (Some(d), _) => d(x),
                (None, Some(d1)) => first_difference(&**d1, x),
                (None, None) => second_difference(&*self.eval, x),
            }),
            _ => Err(Error::Unsupported(format!("derivative of order {order}"))),
        }
    }
}

fn first_difference<T: Real>(f: &dyn Fn(T) -> T, x: T) -> T {
    let h = T::lit(FD_STEP);
    let two = T::lit(2.0);
    if x < h {
        (T::lit(-3.0) * f(x) + T::lit(4.0) * f(x + h) - f(x + two * h)) / (two * h)
    } else if x > T::one() - h {
        (T::lit(3.0) * f(x) - T::lit(4.0) * f(x - h) + f(x - two * h)) / (two * h)
    } else {
        (f(x + h) - f(x - h)) / (two * h)
    }
}

fn second_difference<T: Real>(f: &dyn Fn(T) -> T, x: T) -> T {
    let h = T::lit(FD_STEP);
    let (two, three, four, five) = (T::lit(2.0), T::lit(3.0), T::lit(4.0), T::lit(5.0));
    if x < h {
        (two * f(x) - five * f(x + h) + four * f(x + two * h) - f(x + three * h)) / (h * h)
    } else if x > T::one() - h {
        (two * f(x) - five * f(x - h) + four * f(x - two * h) - f(x - three * h)) / (h * h)
    } else {
        (f(x + h) - two * f(x) + f(x - h)) / (h * h)
    }
}
