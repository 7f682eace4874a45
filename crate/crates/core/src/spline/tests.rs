#![allow(clippy::excessive_precision)]

use super::dense::{dense_hat_matrix, normal_equations_hat_matrix, DenseSpline};
use super::*;
use proptest::prelude::*;

const T7: [f64; 7] = [0.05, 0.18, 0.31, 0.44, 0.58, 0.73, 0.91];
const Y7: [f64; 7] = [0.3, -1.2, 0.8, 1.5, -0.4, 0.2, 1.1];

// Reference values computed in 50-digit arithmetic from the kernel formulation.
const C7: [f64; 7] = [
    5.66581619954582,
    -17.760422268621933,
    8.7284174979287659,
    16.801942918806128,
    -12.178518536168238,
    -5.6808123843111991,
    4.4235765728206551,
];
const D7: [f64; 2] = [-0.14959254156051854, 1.0597081518462229];
const FIT7: [f64; 7] = [
    -0.096607133968207398,
    0.043229558803535276,
    0.18901077514498639,
    0.32386399568357103,
    0.45249629753177663,
    0.59765686690178394,
    0.79034963990255414,
];
const EVAL7_037: f64 = 0.25345348580021597;
const SLOPE7_037: f64 = 1.0449334708106148;

const T5: [f64; 5] = [0.1, 0.25, 0.5, 0.6, 0.85];
const A5: [[f64; 5]; 5] = [
    [
        0.57708897795949935,
        0.41661638269972145,
        0.15474554901093975,
        0.052209979026854838,
        -0.20066088869701538,
    ],
    [
        0.41661638269972145,
        0.32814173278076909,
        0.17654527770812042,
        0.11544730443562127,
        -0.036750697624232218,
    ],
    [
        0.15474554901093975,
        0.17654527770812042,
        0.20912165048349117,
        0.21928437579080412,
        0.24030314700664455,
    ],
    [
        0.052209979026854838,
        0.11544730443562127,
        0.21928437579080412,
        0.25929840616681867,
        0.3537599345799011,
    ],
    [
        -0.20066088869701538,
        -0.036750697624232218,
        0.24030314700664455,
        0.3537599345799011,
        0.64334850473470195,
    ],
];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn fixture7() -> SplineModel<f64> {
    fit(
        &RegressionData::new(T7.to_vec(), Y7.to_vec()).unwrap(),
        0.01,
    )
    .unwrap()
}

#[test]
fn n7_coefficients_match_reference() {
    let m = fixture7();
    for (a, b) in m.coef_kernel().iter().zip(C7) {
        assert!(rel(*a, b) < 1e-8, "{a} vs {b}");
    }
    for (a, b) in m.coef_poly().iter().zip(D7) {
        assert!(rel(*a, b) < 1e-8, "{a} vs {b}");
    }
    for (a, b) in m.fitted().iter().zip(FIT7) {
        assert!(rel(*a, b) < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn n7_dense_route_matches_reference() {
    let o = DenseSpline::fit(&T7, &Y7, 0.01).unwrap();
    for (a, b) in o.coef_kernel().iter().zip(C7) {
        assert!(rel(*a, b) < 1e-10);
    }
    assert!(rel(o.evaluate(0.37), EVAL7_037) < 1e-10);
}

#[test]
fn n7_evaluation_and_slope() {
    let m = fixture7();
    assert!((m.evaluate(0.37).unwrap() - EVAL7_037).abs() < 1e-8);
    assert!((derivative(&m, 0.37, 1).unwrap() - SLOPE7_037).abs() < 1e-8);
    let h = 1e-6;
    let fd = (m.evaluate(0.37 + h).unwrap() - m.evaluate(0.37 - h).unwrap()) / (2.0 * h);
    assert!((derivative(&m, 0.37, 1).unwrap() - fd).abs() < 1e-5);
}

#[test]
fn second_derivative_vanishes_at_ends() {
    let m = fixture7();
    assert_eq!(derivative(&m, 0.0, 2).unwrap(), 0.0);
    assert_eq!(derivative(&m, 1.0, 2).unwrap(), 0.0);
    assert!(derivative(&m, 0.5, 3).is_err());
}

#[test]
fn second_derivative_matches_finite_difference_of_slope() {
    let m = fixture7();
    let h = 1e-6;
    for x in [0.1, 0.37, 0.5, 0.8] {
        let fd = (m.derivative(x + h, 1).unwrap() - m.derivative(x - h, 1).unwrap()) / (2.0 * h);
        assert!((m.derivative(x, 2).unwrap() - fd).abs() < 1e-4);
    }
}

#[test]
fn n5_hat_matrix_matches_reference() {
    let a = hat_matrix(&T5, 0.1).unwrap();
    for (i, row) in A5.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            assert!((a.get(i, j) - v).abs() < 1e-8);
        }
    }
    let q = normal_equations_hat_matrix(&T5, 0.1).unwrap();
    let d = dense_hat_matrix(&T5, 0.1).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            assert!((q[(i, j)] - A5[i][j]).abs() < 1e-9);
            assert!((d[(i, j)] - A5[i][j]).abs() < 1e-9);
        }
    }
}

#[test]
fn hat_matrix_structure() {
    let pts: Vec<f64> = (0..20).map(|i| (i as f64 + 0.5) / 20.0).collect();
    let a = hat_matrix(&pts, 1e-3).unwrap();
    assert!(a.asymmetry() < 1e-8);
    for i in 0..20 {
        let s: f64 = a.row(i).iter().sum();
        assert!((s - 1.0).abs() < 1e-8);
    }
    let line: Vec<f64> = pts.iter().map(|t| 3.0 - 2.0 * t).collect();
    let out = a.apply(&line);
    for (u, v) in out.iter().zip(&line) {
        assert!((u - v).abs() < 1e-9);
    }
}

#[test]
fn line_is_reproduced() {
    for n in [3, 4, 10, 33] {
        let t: Vec<f64> = (0..n).map(|i| (i as f64 + 0.3) / n as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| 2.0 * t + 1.0).collect();
        let m = fit(&RegressionData::new(t, y).unwrap(), 0.5).unwrap();
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            assert!((m.evaluate(x).unwrap() - (2.0 * x + 1.0)).abs() < 1e-9);
            assert!((m.derivative(x, 1).unwrap() - 2.0).abs() < 1e-9);
            assert!(m.derivative(x, 2).unwrap().abs() < 1e-9);
        }
    }
}

#[test]
fn constant_data_gives_constant_fit() {
    let t: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let m = fit(&RegressionData::new(t, vec![-0.7; 9]).unwrap(), 0.02).unwrap();
    for x in [0.0, 0.13, 0.5, 1.0] {
        assert!((m.evaluate(x).unwrap() + 0.7).abs() < 1e-12);
    }
}

#[test]
fn huge_lambda_approaches_least_squares_line() {
    let t: Vec<f64> = vec![0.02, 0.1, 0.33, 0.4, 0.61, 0.75, 0.98];
    let y: Vec<f64> = vec![1.0, -0.5, 0.25, 2.0, -1.0, 0.75, 0.5];
    let m = fit(&RegressionData::new(t.clone(), y.clone()).unwrap(), 1e9).unwrap();
    let n = t.len() as f64;
    let (mt, my) = (t.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = t.iter().zip(&y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let sxx: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    let slope = sxy / sxx;
    for (&ti, &g) in t.iter().zip(m.fitted()) {
        assert!((g - (my + slope * (ti - mt))).abs() < 1e-4);
    }
}

#[test]
fn tiny_lambda_interpolates() {
    let d = RegressionData::new(vec![0.0f64, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
    let m = fit(&d, 1e-12).unwrap();
    assert!((m.evaluate(0.5).unwrap() - 1.0).abs() < 1e-6);
    let exact = interpolate(&d).unwrap();
    assert!((exact.evaluate(0.5).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn residual_decreases_with_lambda() {
    let t: Vec<f64> = (0..15).map(|i| (i as f64 + 0.5) / 15.0).collect();
    let y: Vec<f64> = t
        .iter()
        .map(|t| (7.0 * t).sin() + (t * 31.0).cos() * 0.3)
        .collect();
    let data = RegressionData::new(t.clone(), y.clone()).unwrap();
    let worst = |lam: f64| {
        let m = fit(&data, lam).unwrap();
        t.iter()
            .zip(&y)
            .map(|(&ti, &yi)| (m.evaluate(ti).unwrap() - yi).abs())
            .fold(0.0, f64::max)
    };
    let r: Vec<f64> = [1e-4, 1e-8, 1e-12].iter().map(|&l| worst(l)).collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn noiseless_error_scales_like_lambda_three_quarters() {
    let n = 256;
    let t: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let f = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
    let data =
        RegressionData::new(t, (0..n).map(|i| f(i as f64 / (n - 1) as f64)).collect()).unwrap();
    let sup = |lam: f64| {
        let m = fit(&data, lam).unwrap();
        (0..=2000)
            .map(|k| {
                let x = k as f64 / 2000.0;
                (m.evaluate(x).unwrap() - f(x)).abs()
            })
            .fold(0.0, f64::max)
    };
    let ratio = sup(1e-5) / sup(1e-5 / 16.0);
    assert!((6.0..=12.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn weight_function_consistency() {
    let t: Vec<f64> = (0..12).map(|i| (i as f64 + 0.5) / 12.0).collect();
    let y: Vec<f64> = t.iter().map(|t| t * t - 0.3).collect();
    let lam = 5e-3;
    let op = SmoothingOperator::new(&t, lam).unwrap();
    let model = op.fit(&y).unwrap();
    let a = op.hat_matrix().unwrap();
    let n = t.len() as f64;
    for x in [0.0, 0.21, 0.5, 0.77, 1.0] {
        let w: Vec<f64> = (0..t.len()).map(|i| op.weight(x, i).unwrap()).collect();
        assert!((w.iter().sum::<f64>() / n - 1.0).abs() < 1e-8);
        let u: f64 = w.iter().zip(&y).map(|(g, y)| g * y).sum::<f64>() / n;
        assert!((u - model.evaluate(x).unwrap()).abs() < 1e-8);
    }
    let ay = a.apply(&y);
    for (j, &tj) in t.iter().enumerate() {
        let u: f64 = (0..t.len())
            .map(|i| weight_function(&t, lam, tj, i).unwrap() * y[i])
            .sum::<f64>()
            / n;
        assert!((u - ay[j]).abs() < 1e-8);
    }
}

#[test]
fn nearly_coincident_knots_stay_accurate() {
    let t: Vec<f64> = vec![0.1, 0.3, 0.300001, 0.5, 0.5000002, 0.8, 0.95];
    let y: Vec<f64> = vec![0.4, -1.0, 1.0, 0.2, -0.6, 0.9, 0.0];
    for lam in [1e-6, 1e-3, 1.0] {
        let m = fit(&RegressionData::new(t.clone(), y.clone()).unwrap(), lam).unwrap();
        let o = DenseSpline::fit(&t, &y, lam).unwrap();
        let scale = o.fitted().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (a, b) in m.fitted().iter().zip(o.fitted()) {
            assert!((a - b).abs() / scale < 1e-8);
        }
        let cs = o.coef_kernel().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (a, b) in m.coef_kernel().iter().zip(o.coef_kernel()) {
            assert!((a - b).abs() / cs < 1e-8);
        }
    }
}

#[test]
fn single_precision_fit() {
    let t: Vec<f32> = T7.iter().map(|&v| v as f32).collect();
    let y: Vec<f32> = Y7.iter().map(|&v| v as f32).collect();
    let m = fit(&RegressionData::new(t, y).unwrap(), 0.01f32).unwrap();
    assert!((m.evaluate(0.37f32).unwrap() as f64 - EVAL7_037).abs() < 1e-4);
}

#[test]
fn input_validation() {
    assert!(matches!(
        RegressionData::new(vec![0.1, 0.2], vec![1.0, 2.0]),
        Err(Error::TooFewPoints { .. })
    ));
    assert!(matches!(
        RegressionData::new(vec![0.1, 0.3, 0.2], vec![1.0, 2.0, 3.0]),
        Err(Error::InvalidAbscissae(_))
    ));
    assert!(matches!(
        RegressionData::new(vec![0.1, 0.2, 0.2], vec![1.0, 2.0, 3.0]),
        Err(Error::InvalidAbscissae(_))
    ));
    assert!(matches!(
        RegressionData::new(vec![0.1, 0.2, 1.2], vec![1.0, 2.0, 3.0]),
        Err(Error::InvalidAbscissae(_))
    ));
    assert!(matches!(
        RegressionData::new(vec![0.1, 0.2, 0.3], vec![1.0, 2.0]),
        Err(Error::LengthMismatch { .. })
    ));
    let d = RegressionData::new(vec![0.1, 0.2, 0.3], vec![1.0, 2.0, 3.0]).unwrap();
    assert!(matches!(fit(&d, 0.0), Err(Error::InvalidLambda(_))));
    let m = fit(&d, 0.1).unwrap();
    assert!(matches!(m.evaluate(1.5), Err(Error::OutOfDomain(_))));
    assert!(matches!(m.evaluate(-0.1), Err(Error::OutOfDomain(_))));
}

#[test]
fn gaps_include_domain_ends() {
    let d = RegressionData::new(vec![0.3f64, 0.4, 0.6], vec![0.0; 3]).unwrap();
    assert!((d.max_gap() - 0.4).abs() < 1e-15);
    assert!((d.min_gap() - 0.1).abs() < 1e-15);
}

fn sorted_points(raw: Vec<f64>) -> Option<Vec<f64>> {
    let mut t = raw;
    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if t.windows(2).all(|w| w[1] - w[0] > 1e-3) {
        Some(t)
    } else {
        None
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fit_is_linear(
        raw in prop::collection::vec(0.0f64..1.0, 4..25),
        seed_a in prop::collection::vec(-2.0f64..2.0, 25),
        seed_b in prop::collection::vec(-2.0f64..2.0, 25),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        log_lam in -6.0f64..0.0,
    ) {
        let Some(t) = sorted_points(raw) else { return Ok(()) };
        let n = t.len();
        let lam = 10f64.powf(log_lam);
        let op = SmoothingOperator::new(&t, lam).unwrap();
        let (y1, y2) = (&seed_a[..n], &seed_b[..n]);
        let mix: Vec<f64> = y1.iter().zip(y2).map(|(u, v)| a * u + b * v).collect();
        let (m1, m2, m) = (op.fit(y1).unwrap(), op.fit(y2).unwrap(), op.fit(&mix).unwrap());
        for k in 0..=20 {
            let x = k as f64 / 20.0;
            let lhs = m.evaluate(x).unwrap();
            let rhs = a * m1.evaluate(x).unwrap() + b * m2.evaluate(x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn fit_minimises_objective(
        raw in prop::collection::vec(0.0f64..1.0, 4..20),
        y in prop::collection::vec(-2.0f64..2.0, 20),
        log_lam in -5.0f64..0.0,
        probes in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 20), 100),
    ) {
        let Some(t) = sorted_points(raw) else { return Ok(()) };
        let n = t.len();
        let y = &y[..n];
        let lam = 10f64.powf(log_lam);
        let best = fit(&RegressionData::new(t.clone(), y.to_vec()).unwrap(), lam).unwrap();
        let target = best.objective(&t, y, lam);
        let interp = SmoothingOperator::interpolating(&t).unwrap();
        for p in &probes {
            // Random natural cubic splines with the same knots, some near the optimum.
            let vals: Vec<f64> = best.fitted().iter().zip(p).map(|(f, d)| f + 0.1 * d).collect();
            let g = interp.fit(&vals).unwrap();
            prop_assert!(target <= g.objective(&t, y, lam) + 1e-9);
            let g = interp.fit(&p[..n]).unwrap();
            prop_assert!(target <= g.objective(&t, y, lam) + 1e-9);
        }
    }
}
