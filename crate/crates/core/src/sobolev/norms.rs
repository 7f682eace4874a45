use super::FunctionHandle;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spline::{self, RegressionData};
use crate::tolerance::{INTERPOLATION_SLACK, NORM_EQUIVALENCE_SLACK, QUADRATURE_NODES};

/// Composite Simpson rule on [0, 1] with [`QUADRATURE_NODES`] nodes.
pub fn simpson<T: Real>(g: impl Fn(T) -> T) -> T {
    let panels = QUADRATURE_NODES - 1;
    let h = T::one() / T::from_usize_lossy(panels);
    let (two, four) = (T::lit(2.0), T::lit(4.0));
    let mut acc = g(T::zero()) + g(T::one());
    for i in 1..panels {
        let w = if i % 2 == 1 { four } else { two };
        acc = acc + w * g(T::from_usize_lossy(i) * h);
    }
    acc * h / T::lit(3.0)
}

fn node<T: Real>(i: usize) -> T {
    T::from_usize_lossy(i) / T::from_usize_lossy(QUADRATURE_NODES - 1)
}

/// `L^p` norm of the derivative of order `deriv_order` for `p` in {1, 2, ∞}.
pub fn lp_norm<T: Real>(f: &FunctionHandle<T>, p: T, deriv_order: usize) -> Result<T> {
    if deriv_order > 2 {
        return Err(Error::Unsupported(format!(
            "derivative of order {deriv_order}"
        )));
    }
    let d = |x: T| f.derivative(x, deriv_order).expect("order checked above");
    if p.is_infinite() && p > T::zero() {
        return Ok((0..QUADRATURE_NODES)
            .map(|i| d(node(i)).abs())
            .fold(T::zero(), T::max));
    }
    if p == T::one() {
        Ok(simpson(|x| d(x).abs()))
    } else if p == T::lit(2.0) {
        Ok(simpson(|x| {
            let v = d(x);
            v * v
        })
        .sqrt())
    } else {
        Err(Error::Unsupported(format!("L^p norm with p = {p}")))
    }
}

/// `f(0)^2 + f'(0)^2 + ‖f''‖²`, the squared equivalent norm.
pub fn sobolev_eq_norm_sq<T: Real>(f: &FunctionHandle<T>) -> Result<T> {
    let v = f.eval(T::zero());
    let s = f.derivative(T::zero(), 1)?;
    let c = lp_norm(f, T::lit(2.0), 2)?;
    Ok(v * v + s * s + c * c)
}

/// `‖f‖² + ‖f'‖² + ‖f''‖²`, all in `L²(0, 1)`.
pub fn full_sobolev_norm_sq<T: Real>(f: &FunctionHandle<T>) -> Result<T> {
    let mut acc = T::zero();
    for order in 0..=2 {
        let n = lp_norm(f, T::lit(2.0), order)?;
        acc = acc + n * n;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEquivalenceReport<T> {
    pub full: T,
    pub equivalent: T,
    /// `full / equivalent`, required to lie in `[1/5, 7]`.
    pub ratio: T,
    pub pass: bool,
}

pub fn check_norm_equivalence<T: Real>(f: &FunctionHandle<T>) -> Result<NormEquivalenceReport<T>> {
    let full = full_sobolev_norm_sq(f)?;
    let equivalent = sobolev_eq_norm_sq(f)?;
    let ratio = if full == T::zero() && equivalent == T::zero() {
        T::one()
    } else {
        full / equivalent
    };
    let slack = T::lit(NORM_EQUIVALENCE_SLACK);
    let pass = ratio >= T::lit(0.2) - slack && ratio <= T::lit(7.0) + slack;
    Ok(NormEquivalenceReport {
        full,
        equivalent,
        ratio,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationReport<T> {
    pub sup: T,
    /// `2 sqrt(‖f‖₂ ‖f'‖₂)`.
    pub bound: T,
    pub pass: bool,
}

/// Checks `‖f‖_∞ <= 2 sqrt(‖f‖₂ ‖f'‖₂)`, which needs `‖f‖₂ < ‖f'‖₂` on the unit interval.
pub fn check_interpolation_inequality<T: Real>(
    f: &FunctionHandle<T>,
) -> Result<InterpolationReport<T>> {
    let two = T::lit(2.0);
    let sup = lp_norm(f, T::infinity(), 0)?;
    let l2 = lp_norm(f, two, 0)?;
    let d2 = lp_norm(f, two, 1)?;
    if l2 > T::zero() && !(l2 < d2) {
        let q = if d2 > T::zero() {
            l2 / d2
        } else {
            T::infinity()
        };
        return Err(Error::HypothesisNotMet(q.to_f64().unwrap_or(f64::NAN)));
    }
    let bound = two * (l2 * d2).sqrt();
    Ok(InterpolationReport {
        sup,
        bound,
        pass: sup <= bound + T::lit(INTERPOLATION_SLACK),
    })
}

/// Twenty smooth test functions: polynomials up to degree five, sinusoids,
/// exponentials and fitted splines.
pub fn norm_equivalence_corpus<T: Real>() -> Vec<(String, FunctionHandle<T>)> {
    let c = T::lit;
    let pi = T::PI();
    let mut out: Vec<(String, FunctionHandle<T>)> = vec![
        (
            "one".into(),
            FunctionHandle::new(move |_| T::one())
                .with_first(|_| T::zero())
                .with_second(|_| T::zero()),
        ),
        (
            "t".into(),
            FunctionHandle::new(|t| t)
                .with_first(|_| T::one())
                .with_second(|_| T::zero()),
        ),
        (
            "t^2/2".into(),
            FunctionHandle::new(move |t: T| t * t / c(2.0))
                .with_first(|t| t)
                .with_second(|_| T::one()),
        ),
        (
            "t^3-t".into(),
            FunctionHandle::new(|t: T| t * t * t - t)
                .with_first(move |t: T| c(3.0) * t * t - T::one())
                .with_second(move |t| c(6.0) * t),
        ),
        (
            "t^4".into(),
            FunctionHandle::new(|t: T| t.powi(4))
                .with_first(move |t: T| c(4.0) * t.powi(3))
                .with_second(move |t: T| c(12.0) * t * t),
        ),
        (
            "t^5-2t^2+1".into(),
            FunctionHandle::new(move |t: T| t.powi(5) - c(2.0) * t * t + T::one()),
        ),
        (
            "3-2t".into(),
            FunctionHandle::new(move |t: T| c(3.0) - c(2.0) * t),
        ),
        (
            "(t-0.5)^2".into(),
            FunctionHandle::new(move |t: T| (t - c(0.5)) * (t - c(0.5))),
        ),
        (
            "sin(2pi t)".into(),
            FunctionHandle::new(move |t: T| (c(2.0) * pi * t).sin())
                .with_first(move |t: T| c(2.0) * pi * (c(2.0) * pi * t).cos())
                .with_second(move |t: T| -c(4.0) * pi * pi * (c(2.0) * pi * t).sin()),
        ),
        (
            "cos(2pi t)".into(),
            FunctionHandle::new(move |t: T| (c(2.0) * pi * t).cos()),
        ),
        (
            "sin(4pi t)".into(),
            FunctionHandle::new(move |t: T| (c(4.0) * pi * t).sin()),
        ),
        (
            "sin(pi t)+0.5".into(),
            FunctionHandle::new(move |t: T| (pi * t).sin() + c(0.5)),
        ),
        (
            "cos(3t)".into(),
            FunctionHandle::new(move |t: T| (c(3.0) * t).cos()),
        ),
        (
            "exp(t)".into(),
            FunctionHandle::new(|t: T| t.exp())
                .with_first(|t: T| t.exp())
                .with_second(|t: T| t.exp()),
        ),
        (
            "exp(-3t)".into(),
            FunctionHandle::new(move |t: T| (-c(3.0) * t).exp()),
        ),
        (
            "1/(1+t)".into(),
            FunctionHandle::new(|t: T| T::one() / (T::one() + t)),
        ),
        (
            "t sin(2pi t)".into(),
            FunctionHandle::new(move |t: T| t * (c(2.0) * pi * t).sin()),
        ),
        (
            "0.01 sin(8pi t)".into(),
            FunctionHandle::new(move |t: T| c(0.01) * (c(8.0) * pi * t).sin()),
        ),
    ];
    let knots: Vec<T> = (1..=12).map(|i| c(i as f64 / 13.0)).collect();
    let noisy: Vec<T> = (1..=12)
        .map(|i| c((i as f64 * 1.7).sin() + 0.3 * (i as f64 * 5.3).cos()))
        .collect();
    let data = RegressionData::new(knots, noisy).expect("fixed corpus data is valid");
    let smooth = spline::fit(&data, c(1e-3)).expect("fixed corpus fit");
    let interp = spline::interpolate(&data).expect("fixed corpus interpolation");
    out.push((
        "smoothing spline".into(),
        FunctionHandle::from_spline(smooth),
    ));
    out.push((
        "interpolating spline".into(),
        FunctionHandle::from_spline(interp),
    ));
    out
}
