//! Spline encoder and decoder for coded computation.
//!
//! The encoder `u_e` passes (or nearly passes) through the data points
//! `(α_k, x_k)`; worker `n` evaluates `f` at `u_e(β_n)`. The decoder fits a
//! smoothing spline `u_d` to the returned values at `β_n` and reads the
//! estimates `f̂(x_k) = u_d(α_k)`. Vector data is handled one coordinate at a time.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spline::{validate_points, RegressionData, SmoothingOperator, SplineModel};
use crate::tolerance::LAMBDA_FLOOR_MARGIN;

/// Inputs, encoder points and worker points of one coded computation.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedTask<T> {
    inputs: Vec<Vec<T>>,
    alpha: Vec<T>,
    beta: Vec<T>,
    bound: T,
    m: usize,
}

impl<T: Real> CodedTask<T> {
    /// Task with the default points `α_k = k/(K+1)` and `β_i = i/N`.
    pub fn new(inputs: Vec<Vec<T>>, workers: usize, m: usize, bound: T) -> Result<Self> {
        let k = inputs.len();
        let alpha = (1..=k)
            .map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(k + 1))
            .collect();
        let beta = default_beta(workers);
        Self::with_points(inputs, alpha, beta, m, bound)
    }

    pub fn with_points(
        inputs: Vec<Vec<T>>,
        alpha: Vec<T>,
        beta: Vec<T>,
        m: usize,
        bound: T,
    ) -> Result<Self> {
        let (k, n) = (inputs.len(), beta.len());
        if k < 2 {
            return Err(Error::InvalidTask(format!(
                "need at least 2 inputs, got {k}"
            )));
        }
        if n < k.max(3) {
            return Err(Error::InvalidTask(format!(
                "need at least max(K, 3) = {} workers, got {n}",
                k.max(3)
            )));
        }
        if alpha.len() != k {
            return Err(Error::LengthMismatch {
                points: alpha.len(),
                values: k,
            });
        }
        let d = inputs[0].len();
        if d == 0 || inputs.iter().any(|x| x.len() != d) {
            return Err(Error::InvalidTask(
                "inputs must share a positive dimension".into(),
            ));
        }
        if inputs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTask("non-finite input".into()));
        }
        if m == 0 {
            return Err(Error::InvalidTask(
                "output dimension must be positive".into(),
            ));
        }
        if !(bound > T::zero()) || !bound.is_finite() {
            return Err(Error::InvalidTask(format!(
                "output bound {bound} must be positive"
            )));
        }
        if alpha.iter().any(|&a| !(a > T::zero() && a < T::one()))
            || alpha.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::InvalidAbscissae(
                "encoder points must be strictly increasing in (0, 1)".into(),
            ));
        }
        validate_points(&beta)?;
        Ok(CodedTask {
            inputs,
            alpha,
            beta,
            bound,
            m,
        })
    }

    pub fn inputs(&self) -> &[Vec<T>] {
        &self.inputs
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    pub fn bound(&self) -> T {
        self.bound
    }

    /// Input dimension `d`.
    pub fn d(&self) -> usize {
        self.inputs[0].len()
    }

    /// Output dimension `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of data points `K`.
    pub fn k(&self) -> usize {
        self.inputs.len()
    }

    /// Number of workers `N`.
    pub fn n(&self) -> usize {
        self.beta.len()
    }
}

/// Equidistant worker points `β_i = i/N`, `i = 1..=N`.
pub fn default_beta<T: Real>(n: usize) -> Vec<T> {
    (1..=n)
        .map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(n))
        .collect()
}

/// One spline per coordinate, all on the same knots with the same smoothing parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSpline<T> {
    components: Vec<SplineModel<T>>,
}

impl<T: Real> VectorSpline<T> {
    pub fn new(components: Vec<SplineModel<T>>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidTask("vector spline needs a component".into()));
        };
        if components
            .iter()
            .any(|c| c.knots() != first.knots() || c.lambda() != first.lambda())
        {
            return Err(Error::InvalidTask(
                "components must share knots and smoothing parameter".into(),
            ));
        }
        Ok(VectorSpline { components })
    }

    pub fn components(&self) -> &[SplineModel<T>] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn evaluate(&self, x: T) -> Result<Vec<T>> {
        self.components.iter().map(|c| c.evaluate(x)).collect()
    }
}

/// Fits the encoder: an interpolating natural spline for `lambda_e = 0`, a
/// smoothing spline with parameter `lambda_e` otherwise.
pub fn design_encoder<T: Real>(task: &CodedTask<T>, lambda_e: T) -> Result<VectorSpline<T>> {
    if !(lambda_e >= T::zero()) || !lambda_e.is_finite() {
        return Err(Error::InvalidLambda(lambda_e.to_f64().unwrap_or(f64::NAN)));
    }
    let alpha = task.alpha();
    let column = |j: usize| task.inputs().iter().map(|x| x[j]).collect::<Vec<T>>();
    if alpha.len() == 2 {
        let components = (0..task.d())
            .map(|j| SplineModel::line(alpha.to_vec(), column(j), lambda_e))
            .collect();
        return VectorSpline::new(components);
    }
    let op = if lambda_e > T::zero() {
        SmoothingOperator::new(alpha, lambda_e)?
    } else {
        SmoothingOperator::interpolating(alpha)?
    };
    let components = (0..task.d())
        .map(|j| op.fit(&column(j)))
        .collect::<Result<Vec<_>>>()?;
    VectorSpline::new(components)
}

/// Coded inputs `x̃_n = u_e(β_n)`.
pub fn encode<T: Real>(encoder: &VectorSpline<T>, beta: &[T]) -> Result<Vec<Vec<T>>> {
    beta.iter().map(|&b| encoder.evaluate(b)).collect()
}

/// Decoder smoothing parameter `clamp(J N^{(8/5)(a-1)}, C_λ N^{-4} (1 + 1e-9), 1)`.
pub fn choose_lambda_d<T: Real>(n: usize, a: T, j: T, c_lambda: T) -> Result<T> {
    if !(a >= T::zero() && a < T::one()) {
        return Err(Error::InvalidExponent(a.to_f64().unwrap_or(f64::NAN)));
    }
    if n < 2 {
        return Err(Error::TooFewPoints {
            required: 2,
            actual: n,
        });
    }
    for (name, v) in [("J", j), ("C_lambda", c_lambda)] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::Unsupported(format!("{name} = {v} must be positive")));
        }
    }
    let nt = T::from_usize_lossy(n);
    let raw = j * nt.powf(T::lit(1.6) * (a - T::one()));
    let floor = c_lambda * nt.powi(-4) * (T::one() + T::lit(LAMBDA_FLOOR_MARGIN));
    Ok(raw.max(floor).min(T::one()))
}

/// Handling of responses outside `[-M, M]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangePolicy {
    #[default]
    Clamp,
    Reject,
}

/// Fits the decoder `u_d` to the responses at the worker points.
pub fn fit_decoder<T: Real>(
    beta: &[T],
    responses: &[Vec<T>],
    lambda_d: T,
    bound: T,
    policy: RangePolicy,
) -> Result<VectorSpline<T>> {
    if !(lambda_d > T::zero() && lambda_d <= T::one()) {
        return Err(Error::InvalidLambda(lambda_d.to_f64().unwrap_or(f64::NAN)));
    }
    if responses.len() != beta.len() {
        return Err(Error::LengthMismatch {
            points: beta.len(),
            values: responses.len(),
        });
    }
    let m = responses.first().map_or(0, Vec::len);
    if m == 0 || responses.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidTask(
            "responses must share a positive dimension".into(),
        ));
    }
    let op = SmoothingOperator::new(beta, lambda_d)?;
    let mut components = Vec::with_capacity(m);
    for j in 0..m {
        let mut values = Vec::with_capacity(responses.len());
        for (i, r) in responses.iter().enumerate() {
            let v = r[j];
            if v.abs() <= bound {
                values.push(v);
                continue;
            }
            match policy {
                RangePolicy::Clamp if !v.is_nan() => values.push(v.max(-bound).min(bound)),
                _ => {
                    return Err(Error::ResponseOutOfRange {
                        index: i,
                        component: j,
                        value: v.to_f64().unwrap_or(f64::NAN),
                        bound: bound.to_f64().unwrap_or(f64::NAN),
                    })
                }
            }
        }
        components.push(op.fit(&values)?);
    }
    VectorSpline::new(components)
}

/// Estimates `f̂(x_k) = u_d(α_k)` from the worker responses.
pub fn decode<T: Real>(
    beta: &[T],
    responses: &[Vec<T>],
    lambda_d: T,
    alpha: &[T],
    bound: T,
    policy: RangePolicy,
) -> Result<Vec<Vec<T>>> {
    let decoder = fit_decoder(beta, responses, lambda_d, bound, policy)?;
    alpha.iter().map(|&a| decoder.evaluate(a)).collect()
}

/// Fits a scalar spline to `(points, values)`; the encoder and decoder building block.
pub fn fit_scalar<T: Real>(points: &[T], values: &[T], lambda: T) -> Result<SplineModel<T>> {
    let data = RegressionData::new(points.to_vec(), values.to_vec())?;
    if lambda > T::zero() {
        crate::spline::fit(&data, lambda)
    } else {
        crate::spline::interpolate(&data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::dense::DenseSpline;

    fn scalar_task(xs: &[f64], n: usize) -> CodedTask<f64> {
        CodedTask::new(xs.iter().map(|&x| vec![x]).collect(), n, 1, 10.0).unwrap()
    }

    #[test]
    fn default_points() {
        let t = scalar_task(&[0.0, 1.0, 2.0, 3.0], 8);
        assert_eq!(t.alpha(), &[0.2, 0.4, 0.6, 0.8]);
        assert_eq!(t.beta()[7], 1.0);
        assert_eq!((t.k(), t.n(), t.d(), t.m()), (4, 8, 1, 1));
    }

    #[test]
    fn task_validation() {
        let one = vec![vec![0.0]];
        assert!(CodedTask::new(one, 8, 1, 1.0).is_err());
        let xs: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        assert!(CodedTask::new(xs.clone(), 4, 1, 1.0).is_err());
        assert!(CodedTask::new(xs.clone(), 8, 1, 0.0).is_err());
        let bad_alpha = vec![0.1, 0.2, 0.2, 0.5, 0.6];
        assert!(matches!(
            CodedTask::with_points(xs, bad_alpha, default_beta(8), 1, 1.0),
            Err(Error::InvalidAbscissae(_))
        ));
    }

    #[test]
    fn collinear_encoder_is_the_line() {
        let t = scalar_task(&[1.4, 1.8, 2.2, 2.6], 16);
        let enc = design_encoder(&t, 0.0).unwrap();
        for i in 0..=30 {
            let x = 0.2 + 0.6 * i as f64 / 30.0;
            assert!((enc.evaluate(x).unwrap()[0] - (2.0 * x + 1.0)).abs() < 1e-12);
        }
        assert!((encode(&enc, &[0.5]).unwrap()[0][0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn interpolating_encoder_hits_the_data() {
        let xs = [0.3, -1.0, 2.5, 0.7, 1.1, -0.2];
        let t = scalar_task(&xs, 12);
        let enc = design_encoder(&t, 0.0).unwrap();
        for (a, x) in t.alpha().iter().zip(xs) {
            assert!((enc.evaluate(*a).unwrap()[0] - x).abs() < 1e-9);
        }
    }

    #[test]
    fn two_point_encoder() {
        let t = CodedTask::new(vec![vec![1.0f64, 0.0], vec![3.0, -1.0]], 8, 1, 5.0).unwrap();
        let enc = design_encoder(&t, 0.0).unwrap();
        let v = enc.evaluate(0.5).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-12 && (v[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn smoothing_encoder_matches_dense_route() {
        let xs = [0.4, -0.3, 1.2, 0.9, -0.8];
        let t = scalar_task(&xs, 10);
        let enc = design_encoder(&t, 1e-3).unwrap();
        let o = DenseSpline::fit(t.alpha(), &xs, 1e-3).unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert!((enc.evaluate(x).unwrap()[0] - o.evaluate(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_encoder() {
        let t = scalar_task(&[0.25; 4], 6);
        let enc = design_encoder(&t, 0.0).unwrap();
        for row in encode(&enc, t.beta()).unwrap() {
            assert!((row[0] - 0.25).abs() < 1e-14);
        }
        assert!(matches!(encode(&enc, &[1.5]), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn lambda_rule() {
        let l = choose_lambda_d(100, 0.5, 1.0, 1.0).unwrap();
        assert!((l - 10f64.powf(-1.6)).abs() < 1e-15);
        assert_eq!(choose_lambda_d(2, 0.0, 1e6, 1.0).unwrap(), 1.0);
        let l = choose_lambda_d(10, 0.5, 1e-12, 1.0).unwrap();
        assert!(l > 1e-4 && l < 1e-4 * (1.0 + 1e-8));
        assert!(matches!(
            choose_lambda_d(10, 1.0, 1.0, 1.0),
            Err(Error::InvalidExponent(_))
        ));
        assert!(matches!(
            choose_lambda_d(10, -0.1, 1.0, 1.0),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn decode_constant_and_linear() {
        let beta = default_beta::<f64>(20);
        let resp: Vec<Vec<f64>> = beta.iter().map(|_| vec![1.5, -2.0]).collect();
        let out = decode(&beta, &resp, 0.3, &[0.2, 0.6], 3.0, RangePolicy::Clamp).unwrap();
        for row in out {
            assert!((row[0] - 1.5).abs() < 1e-12 && (row[1] + 2.0).abs() < 1e-12);
        }
        let xs = [-0.5, 0.1, 0.4, 0.9];
        let t = scalar_task(&xs, 64);
        let enc = design_encoder(&t, 0.0).unwrap();
        let coded = encode(&enc, t.beta()).unwrap();
        let est = decode(t.beta(), &coded, 1e-8, t.alpha(), 10.0, RangePolicy::Clamp).unwrap();
        for (e, x) in est.iter().zip(xs) {
            assert!((e[0] - x).abs() < 1e-4);
        }
    }

    #[test]
    fn decode_matches_dense_route() {
        let beta = default_beta::<f64>(16);
        let y: Vec<f64> = (0..16).map(|i| ((i * 7 % 11) as f64 - 5.0) / 3.0).collect();
        let resp: Vec<Vec<f64>> = y.iter().map(|&v| vec![v]).collect();
        let est = decode(&beta, &resp, 0.01, &[0.3, 0.7], 2.0, RangePolicy::Clamp).unwrap();
        let o = DenseSpline::fit(&beta, &y, 0.01).unwrap();
        assert!((est[0][0] - o.evaluate(0.3)).abs() < 1e-8);
        assert!((est[1][0] - o.evaluate(0.7)).abs() < 1e-8);
    }

    #[test]
    fn range_policies() {
        let beta = default_beta::<f64>(8);
        let mut resp: Vec<Vec<f64>> = beta.iter().map(|_| vec![0.5]).collect();
        resp[3][0] = 7.0;
        let err = decode(&beta, &resp, 0.1, &[0.5], 1.0, RangePolicy::Reject).unwrap_err();
        assert!(matches!(
            err,
            Error::ResponseOutOfRange {
                index: 3,
                component: 0,
                ..
            }
        ));
        let mut clamped = resp.clone();
        clamped[3][0] = 1.0;
        let a = decode(&beta, &resp, 0.1, &[0.5], 1.0, RangePolicy::Clamp).unwrap();
        let b = decode(&beta, &clamped, 0.1, &[0.5], 1.0, RangePolicy::Reject).unwrap();
        assert_eq!(a, b);
        assert!(decode(&beta, &resp, 0.0, &[0.5], 1.0, RangePolicy::Clamp).is_err());
        assert!(decode(&beta, &resp, 1.5, &[0.5], 1.0, RangePolicy::Clamp).is_err());
    }

    #[test]
    fn permuting_outputs_permutes_estimates() {
        let beta = default_beta::<f64>(12);
        let resp: Vec<Vec<f64>> = beta.iter().map(|b| vec![b.sin(), b * b, -b]).collect();
        let perm: Vec<Vec<f64>> = resp.iter().map(|r| vec![r[2], r[0], r[1]]).collect();
        let a = decode(&beta, &resp, 0.05, &[0.25, 0.5], 2.0, RangePolicy::Clamp).unwrap();
        let b = decode(&beta, &perm, 0.05, &[0.25, 0.5], 2.0, RangePolicy::Clamp).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(vec![x[2], x[0], x[1]], *y);
        }
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn decode_is_linear(
            y1 in prop::collection::vec(-1.0f64..1.0, 24),
            y2 in prop::collection::vec(-1.0f64..1.0, 24),
            a in -1.0f64..1.0,
            b in -1.0f64..1.0,
            log_lam in -6.0f64..0.0,
        ) {
            let beta = default_beta::<f64>(24);
            let lam = 10f64.powf(log_lam);
            let wrap = |v: &[f64]| v.iter().map(|&x| vec![x]).collect::<Vec<_>>();
            let mix: Vec<f64> = y1.iter().zip(&y2).map(|(u, v)| a * u + b * v).collect();
            let alpha = [0.1, 0.45, 0.8];
            let d1 = decode(&beta, &wrap(&y1), lam, &alpha, 2.0, RangePolicy::Reject).unwrap();
            let d2 = decode(&beta, &wrap(&y2), lam, &alpha, 2.0, RangePolicy::Reject).unwrap();
            let dm = decode(&beta, &wrap(&mix), lam, &alpha, 2.0, RangePolicy::Reject).unwrap();
            for k in 0..3 {
                prop_assert!((dm[k][0] - (a * d1[k][0] + b * d2[k][0])).abs() < 1e-8);
            }
        }
    }
}
